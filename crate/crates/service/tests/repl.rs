mod common;

use std::io::Cursor;

use tabletop_core::controller::SessionState;
use tabletop_service::repl::run_repl;

fn session(
    input: &str,
    show_perceived: bool,
) -> (String, Vec<tabletop_core::controller::DialogueSession>) {
    let scene = common::library().get("blue_red_cups").unwrap();
    let mut out = Vec::new();
    let sessions = run_repl(
        scene,
        Cursor::new(input.to_string()),
        &mut out,
        show_perceived,
    )
    .unwrap();
    (String::from_utf8(out).unwrap(), sessions)
}

#[test]
fn asks_and_resolves() {
    let (out, sessions) = session("give me the cup\nthe red one\n/quit\nnever read\n", false);
    assert!(
        out.contains("robot: do you mean the blue or the red cup?"),
        "{out}"
    );
    assert!(out.contains("robot: I will take cup_red."), "{out}");
    assert!(!out.contains("never read"));
    assert_eq!(sessions.len(), 1);
    assert_eq!(sessions[0].state(), SessionState::Resolved);
}

#[test]
fn new_instruction_after_an_ending_opens_a_new_session() {
    let (out, sessions) = session("give me the red cup\ngive me the plate\n", true);
    assert_eq!(sessions.len(), 2);
    assert!(out.contains("I will take plate_1."), "{out}");
    assert!(out.contains("3 objects perceived"), "{out}");
}

#[test]
fn perceived_table_and_errors_are_not_fatal() {
    let (out, sessions) = session("/scene\ngive me\n", false);
    assert!(out.contains("cup_blue"), "{out}");
    assert!(out.contains("I give up (parse_error"), "{out}");
    assert_eq!(sessions[0].state(), SessionState::Failed);
}
