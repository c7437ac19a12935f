//! Total parsers over model responses: they scan for the response markers
//! and return structured errors on anything else, never panicking. Scanning
//! takes the LAST matching marker line, since chain-of-thought text may
//! mention a marker earlier.

use crate::pddl::{parse_action_string, GroundAction, PddlError};
use crate::policy::Rating;

use super::LlmError;

/// Case-insensitive ASCII marker match at the start of a line. Char-wise, so
/// multibyte content never trips a byte-boundary slice.
fn starts_with_marker(line: &str, marker: &str) -> bool {
    let mut chars = line.chars();
    marker.chars().all(|m| match chars.next() {
        Some(c) => c.eq_ignore_ascii_case(&m),
        None => false,
    })
}

/// Find the last line starting with `marker` (case-insensitive) and return
/// its payload. A marker whose own line is blank after the colon takes the
/// next non-empty line as payload.
fn last_marked_payload<'a>(response: &'a str, marker: &str) -> Option<&'a str> {
    let lines: Vec<&str> = response.lines().collect();
    for (i, line) in lines.iter().enumerate().rev() {
        let trimmed = line.trim_start();
        if starts_with_marker(trimmed, marker) {
            // Matched chars are ASCII, so the marker's byte length is a
            // char boundary here.
            let payload = trimmed[marker.len()..].trim();
            if !payload.is_empty() {
                return Some(payload);
            }
            for follow in &lines[i + 1..] {
                if !follow.trim().is_empty() {
                    return Some(follow.trim());
                }
            }
            return Some("");
        }
    }
    None
}

/// Split on commas outside parentheses, so typed argument lists stay whole.
fn split_top_level(payload: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut start = 0;
    for (i, ch) in payload.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                parts.push(&payload[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&payload[start..]);
    parts
}

fn parse_marked_actions(
    response: &str,
    marker: &str,
    ground_set: &[GroundAction],
) -> Result<Vec<GroundAction>, LlmError> {
    let payload = last_marked_payload(response, marker)
        .ok_or_else(|| LlmError::Format(format!("no '{marker}' line in response")))?;
    if payload.is_empty() {
        return Err(LlmError::Format(format!("'{marker}' line is empty")));
    }
    let mut actions = Vec::new();
    for token in split_top_level(payload)
        .into_iter()
        .map(str::trim)
        .filter(|t| !t.is_empty())
    {
        match parse_action_string(token, ground_set) {
            Ok(action) => actions.push(action.clone()),
            Err(PddlError::UnknownAction(text)) => return Err(LlmError::UnknownAction(text)),
            Err(other) => return Err(LlmError::Format(other.to_string())),
        }
    }
    if actions.is_empty() {
        return Err(LlmError::Format(format!("'{marker}' line has no actions")));
    }
    Ok(actions)
}

/// Extract the plan from the last `Action Sequence:` line.
pub fn parse_action_sequence(
    response: &str,
    ground_set: &[GroundAction],
) -> Result<Vec<GroundAction>, LlmError> {
    parse_marked_actions(response, "Action Sequence:", ground_set)
}

/// Extract proposed actions from the last `Actions:` line.
pub fn parse_actions_line(
    response: &str,
    ground_set: &[GroundAction],
) -> Result<Vec<GroundAction>, LlmError> {
    parse_marked_actions(response, "Actions:", ground_set)
}

/// Extract the rating from the last `Rating:` line.
pub fn parse_rating(response: &str) -> Result<Rating, LlmError> {
    let payload = last_marked_payload(response, "Rating:")
        .ok_or_else(|| LlmError::Format("no 'Rating:' line in response".into()))?;
    Rating::from_label(payload)
        .ok_or_else(|| LlmError::Format(format!("unrecognized rating label '{payload}'")))
}

/// Extract `(state index, action)` from the last `Selection:` line, written
/// as `state <index>, <action>`.
pub fn parse_selection(
    response: &str,
    ground_set: &[GroundAction],
) -> Result<(usize, GroundAction), LlmError> {
    let payload = last_marked_payload(response, "Selection:")
        .ok_or_else(|| LlmError::Format("no 'Selection:' line in response".into()))?;
    let rest = payload
        .strip_prefix("state ")
        .or_else(|| payload.strip_prefix("State "))
        .ok_or_else(|| {
            LlmError::Format(format!(
                "selection must start with 'state <index>', got '{payload}'"
            ))
        })?;
    let parts = split_top_level(rest);
    if parts.len() != 2 {
        return Err(LlmError::Format(format!(
            "selection must be 'state <index>, <action>', got '{payload}'"
        )));
    }
    let (index_text, action_text) = (parts[0], parts[1]);
    let index: usize = index_text.trim().parse().map_err(|_| {
        LlmError::Format(format!(
            "selection state index is not a number: '{}'",
            index_text.trim()
        ))
    })?;
    match parse_action_string(action_text, ground_set) {
        Ok(action) => Ok((index, action.clone())),
        Err(PddlError::UnknownAction(text)) => Err(LlmError::UnknownAction(text)),
        Err(other) => Err(LlmError::Format(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::pddl::{parse_pddl, GroundedProblem};
    use crate::policy::RatingValue;

    fn ground() -> Vec<GroundAction> {
        let p = parse_pddl(fixtures::BLOCKSWORLD_DOMAIN, fixtures::BLOCKS3_PROBLEM).unwrap();
        GroundedProblem::new(p).unwrap().actions.as_ref().clone()
    }

    #[test]
    fn sequence_on_the_line_after_the_marker() {
        let g = ground();
        let response = "Reflect:\nsome thoughts\n\nThink:\nmore thoughts\n\nAction Sequence:\nunstack(a:default,b:default), put-down(a:default), pick-up(b:default), stack(b:default,c:default)";
        let plan = parse_action_sequence(response, &g).unwrap();
        assert_eq!(plan.len(), 4);
        assert_eq!(plan[0].display_name, "unstack(a:default,b:default)");
    }

    #[test]
    fn last_marker_wins() {
        let g = ground();
        let response =
            "Action Sequence: pick-up(a)\nwait, reconsidering\nAction Sequence: pick-up(c)";
        let plan = parse_action_sequence(response, &g).unwrap();
        assert_eq!(plan[0].display_name, "pick-up(c:default)");
    }

    #[test]
    fn missing_marker_is_a_format_error() {
        let g = ground();
        match parse_action_sequence("Reflect: hmm\nThink: hmm", &g) {
            Err(LlmError::Format(msg)) => assert!(msg.contains("Action Sequence:")),
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_tokens_are_reported_verbatim() {
        let g = ground();
        match parse_action_sequence("Action Sequence: pick-up(a), fly(a)", &g) {
            Err(LlmError::UnknownAction(text)) => assert_eq!(text, "fly(a)"),
            other => panic!("expected unknown action, got {other:?}"),
        }
    }

    #[test]
    fn actions_line_parses_proposals() {
        let g = ground();
        let response =
            "Think: both look useful\nActions: pick-up(a:default), unstack(a:default,b:default)";
        let actions = parse_actions_line(response, &g).unwrap();
        assert_eq!(actions.len(), 2);
    }

    #[test]
    fn rating_parses_case_insensitively() {
        assert_eq!(
            parse_rating("Think: close\nRating: maybe").unwrap().value,
            RatingValue::Maybe
        );
        assert_eq!(
            parse_rating("Rating: SURE").unwrap().value,
            RatingValue::Certain
        );
        match parse_rating("Rating: 7/10") {
            Err(LlmError::Format(msg)) => assert!(msg.contains("7/10")),
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn selection_round_trip() {
        let g = ground();
        let (idx, action) =
            parse_selection("Think: go back\nSelection: state 0, pick-up(b)", &g).unwrap();
        assert_eq!(idx, 0);
        assert_eq!(action.display_name, "pick-up(b:default)");
        assert!(parse_selection("Selection: banana", &g).is_err());
        assert!(parse_selection("Selection: state x, pick-up(b)", &g).is_err());
    }
}
