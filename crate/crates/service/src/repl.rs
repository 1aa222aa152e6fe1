//! Line-oriented terminal dialogue with the robot.

use std::io::{self, BufRead, Write};
use std::sync::Arc;

use tabletop_core::controller::{DialogueSession, ResolutionOutcome, SessionConfig, SessionState};
use tabletop_core::scene::Scene;

const HELP: &str =
    "commands: /scene shows what the robot perceives, /transcript dumps the log, /quit exits";

/// Reads utterances and answers from `input` until `/quit` or end of input.
/// A line sent after a session has ended starts a new one. Returns the
/// sessions in order.
pub fn run_repl(
    scene: Arc<Scene>,
    input: impl BufRead,
    mut out: impl Write,
    show_perceived: bool,
) -> io::Result<Vec<DialogueSession>> {
    let mut sessions = vec![new_session(&scene, 1)];
    writeln!(
        out,
        "scene {} with {} objects. {HELP}",
        scene.id,
        scene.objects.len()
    )?;
    prompt(&mut out, sessions.last().unwrap())?;

    for line in input.lines() {
        let line = line?;
        let text = line.trim();
        match text {
            "" => {}
            "/quit" => break,
            "/help" => writeln!(out, "{HELP}")?,
            "/scene" => write_percepts(&mut out, sessions.last().unwrap(), &scene)?,
            "/transcript" => write!(out, "{}", sessions.last().unwrap().transcript().to_json())?,
            _ => {
                if matches!(
                    sessions.last().unwrap().state(),
                    SessionState::Resolved | SessionState::Failed
                ) {
                    let next = new_session(&scene, sessions.len() + 1);
                    sessions.push(next);
                }
                let session = sessions.last_mut().unwrap();
                let outcome = match session.state() {
                    SessionState::AwaitingClarification => session.handle_answer(text),
                    _ => session.handle_utterance(text, &scene),
                };
                match outcome {
                    Ok(o) => write_outcome(&mut out, &o)?,
                    Err(e) => writeln!(out, "error: {e}")?,
                }
                if show_perceived {
                    write_percepts(&mut out, session, &scene)?;
                }
            }
        }
        prompt(&mut out, sessions.last().unwrap())?;
    }
    writeln!(out)?;
    Ok(sessions)
}

fn new_session(scene: &Scene, n: usize) -> DialogueSession {
    DialogueSession::new(
        format!("repl-{n}"),
        scene.id.clone(),
        SessionConfig::default(),
    )
}

fn prompt(out: &mut impl Write, session: &DialogueSession) -> io::Result<()> {
    let who = match session.state() {
        SessionState::AwaitingClarification => "answer",
        _ => "you",
    };
    write!(out, "{who}> ")?;
    out.flush()
}

fn write_outcome(out: &mut impl Write, outcome: &ResolutionOutcome) -> io::Result<()> {
    match outcome {
        ResolutionOutcome::Resolved { target } => writeln!(out, "robot: I will take {target}."),
        ResolutionOutcome::Question(q) => {
            writeln!(out, "robot: {}", q.text)?;
            for (i, option) in q.options.iter().enumerate() {
                writeln!(out, "  {}. {option}", i + 1)?;
            }
            Ok(())
        }
        ResolutionOutcome::Failed(reason) => writeln!(out, "robot: I give up ({reason})."),
    }
}

/// Table of the robot's latest percepts; before any scan, of the ground truth
/// the detector would see from the current viewpoint.
fn write_percepts(
    out: &mut impl Write,
    session: &DialogueSession,
    scene: &Scene,
) -> io::Result<()> {
    let percepts = if session.graph().is_some() {
        session.percepts().to_vec()
    } else {
        tabletop_core::perception::detect(scene, session.viewpoint(), session.detector())
    };
    writeln!(
        out,
        "viewpoint {:.0} deg, {} objects perceived",
        session.viewpoint().azimuth_deg,
        percepts.len()
    )?;
    writeln!(
        out,
        "  {:<14} {:<10} {:<8} {:<6} {:>6} {:>6} {:>5}",
        "id", "category", "color", "size", "x", "y", "conf"
    )?;
    for p in &percepts {
        writeln!(
            out,
            "  {:<14} {:<10} {:<8} {:<6} {:>6.2} {:>6.2} {:>5.2}",
            p.object_id,
            p.category,
            p.color.as_str(),
            p.size.as_str(),
            p.position[0],
            p.position[1],
            p.confidence
        )?;
    }
    Ok(())
}
