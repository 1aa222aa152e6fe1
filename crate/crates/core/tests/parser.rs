use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tabletop_core::fuzzy::RelationName;
use tabletop_core::parser::{parse, parse_answer, Answer};
use tabletop_core::refexp::{render, RefExp};
use tabletop_core::scene::ColorName;
use tabletop_core::testkit::checks;

#[test]
fn render_then_parse_is_identity() {
    checks::parser_round_trip(41, 10_000).unwrap();
}

#[test]
fn parsers_are_total() {
    checks::parser_totality(42, 10_000).unwrap();
}

#[test]
fn give_me_the_cup() {
    let r = parse("give me the cup").unwrap();
    assert!(r.same_structure(&RefExp::new("cup")));
    assert_eq!(r.raw_text, "give me the cup");
}

#[test]
fn the_book_is_next_to_the_teapot() {
    let r = parse("the book is next to the teapot").unwrap();
    let expected = RefExp::new("book").with_relation(RelationName::NextTo, RefExp::new("teapot"));
    assert!(r.same_structure(&expected));
    assert_eq!(r.depth(), 1);
}

#[test]
fn attribute_order_does_not_matter() {
    let words = ["red", "small", "round"];
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    let canonical = parse("the red small round cup").unwrap();
    for _ in 0..20 {
        let mut shuffled = words;
        shuffled.shuffle(&mut rng);
        let r = parse(&format!("the {} cup", shuffled.join(" "))).unwrap();
        assert!(r.same_structure(&canonical));
    }
}

#[test]
fn synonyms_normalize() {
    let r = parse("hand me the blue mug").unwrap();
    assert!(r.same_structure(&RefExp::new("cup").with_color(ColorName::Blue)));
}

#[test]
fn third_level_of_nesting_is_rejected() {
    let err = parse("the cup left of the book on the plate near the phone").unwrap_err();
    assert_eq!(err.found, "near");
    assert!(parse("the cup left of the book on the plate").is_ok());
}

#[test]
fn rendered_questions_options_parse_as_answers() {
    for text in [
        "blue",
        "the one behind the book",
        "the first one",
        "i mean the big one",
    ] {
        assert!(parse_answer(text).is_ok(), "{text}");
    }
    assert_eq!(parse_answer("the second one").unwrap(), Answer::Ordinal(1));
}

#[test]
fn render_is_stable() {
    let r = parse("the red cup that is left of the big book").unwrap();
    assert_eq!(render(&r), "the red cup left of the big book");
    assert_eq!(render(&parse(&render(&r)).unwrap()), render(&r));
}
