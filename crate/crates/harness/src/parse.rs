use gridbench::Action;

use crate::config::Preset;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParsedAction {
    pub action: Action,
    /// Nothing usable was found, or the number was not a valid action; the action is noop.
    pub parse_failure: bool,
}

/// Integer spelled by the leading digits of `s`, if any.
fn leading_integer(s: &str) -> Option<u64> {
    let digits: String = s.chars().take_while(|c| c.is_ascii_digit()).collect();
    if digits.is_empty() {
        return None;
    }
    Some(digits.parse().unwrap_or(u64::MAX))
}

/// First run of digits not glued to a letter, digit or sign on either side.
fn first_standalone_integer(text: &str) -> Option<u64> {
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        if chars[i].is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let at = |j: Option<usize>| j.and_then(|j| chars.get(j)).copied();
            let word = |c: Option<char>| c.is_some_and(|c| c.is_alphanumeric() || c == '_');
            let digit = |c: Option<char>| c.is_some_and(|c| c.is_ascii_digit());
            let before = at(start.checked_sub(1));
            let glued_before = word(before)
                || before == Some('-')
                || (before == Some('.') && digit(at(start.checked_sub(2))));
            let after = at(Some(i));
            let glued_after = word(after) || (after == Some('.') && digit(at(Some(i + 1))));
            if !glued_before && !glued_after {
                return chars[start..i].iter().collect::<String>().parse().ok().or(Some(u64::MAX));
            }
        } else {
            i += 1;
        }
    }
    None
}

/// Integer after the last `ACTION:` marker (case-insensitive).
fn last_marker_integer(text: &str) -> Option<u64> {
    let upper = text.to_ascii_uppercase();
    let at = upper.rfind("ACTION:")?;
    let rest = text[at + "ACTION:".len()..].trim_start();
    let rest = rest.trim_start_matches(['<', '[', '(', '*', '"', '\'']);
    leading_integer(rest)
}

/// Extract the action the model chose; anything unusable becomes a flagged noop.
///
/// ```
/// use gridbench::Action;
/// use gridbench_harness::{parse_action, Preset};
///
/// let all = Action::ALL;
/// assert_eq!(parse_action(Preset::MarkovianReasoner, "I should move up.\nACTION: 1", &all).action, Action::MoveUp);
/// assert!(parse_action(Preset::MarkovianReasoner, "banana", &all).parse_failure);
/// ```
pub fn parse_action(preset: Preset, response: &str, valid: &[Action]) -> ParsedAction {
    let code = match preset {
        Preset::Markovian => first_standalone_integer(response),
        Preset::MarkovianReasoner => last_marker_integer(response),
    };
    match code.and_then(|c| i64::try_from(c).ok()).and_then(Action::from_code) {
        Some(a) if valid.contains(&a) => ParsedAction { action: a, parse_failure: false },
        _ => ParsedAction { action: Action::Noop, parse_failure: true },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ALL: [Action; 6] = Action::ALL;

    #[test]
    fn reasoner_fixtures() {
        let p = |s| parse_action(Preset::MarkovianReasoner, s, &ALL);
        assert_eq!(p("I should move up.\nACTION: 1"), ParsedAction { action: Action::MoveUp, parse_failure: false });
        assert_eq!(p("banana"), ParsedAction { action: Action::Noop, parse_failure: true });
        assert_eq!(p("ACTION: 4\n...\nACTION: 2").action, Action::MoveDown);
        assert_eq!(p("action: <5>").action, Action::Interact);
        assert!(p("ACTION: 9").parse_failure);
        assert!(p("I pick 3 but forget the marker").parse_failure);
    }

    #[test]
    fn markovian_takes_first_standalone_integer() {
        let p = |s| parse_action(Preset::Markovian, s, &ALL);
        assert_eq!(p("3").action, Action::MoveLeft);
        assert_eq!(p("Room 7x7, I choose 4.").action, Action::MoveRight);
        assert_eq!(p("  2\n").action, Action::MoveDown);
        assert!(p("-1").parse_failure);
        assert!(p("none").parse_failure);
    }

    #[test]
    fn invalid_in_state_is_a_failure() {
        let r = parse_action(Preset::Markovian, "5", &[Action::Noop, Action::MoveUp]);
        assert_eq!(r, ParsedAction { action: Action::Noop, parse_failure: true });
    }
}
