use gridbench::Action;
use gridbench_harness::{parse_action, Preset};
use proptest::prelude::*;

const ALL: [Action; 6] = [Action::Noop, Action::MoveUp, Action::MoveDown, Action::MoveLeft, Action::MoveRight, Action::Interact];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn parsing_arbitrary_text_yields_a_valid_action(text in ".{0,200}", reasoner in any::<bool>(), mask in 1u8..64) {
        let preset = if reasoner { Preset::MarkovianReasoner } else { Preset::Markovian };
        let valid: Vec<Action> = ALL.iter().copied().filter(|a| mask & (1 << a.code()) != 0).collect();
        let parsed = parse_action(preset, &text, &valid);
        prop_assert!(parsed.parse_failure || valid.contains(&parsed.action));
        if parsed.parse_failure {
            prop_assert_eq!(parsed.action, Action::Noop);
        }
    }

    #[test]
    fn the_last_marker_wins(first in 0u8..6, last in 0u8..6, filler in "[a-z ]{0,30}") {
        let text = format!("ACTION: {first}\n{filler}\naction: {last}");
        let parsed = parse_action(Preset::MarkovianReasoner, &text, &ALL);
        prop_assert!(!parsed.parse_failure);
        prop_assert_eq!(parsed.action.code(), last);
    }
}
