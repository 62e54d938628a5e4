mod common;

use common::random_states;
use gridbench::{Difficulty, Env, ObsMode, TaskId};

#[test]
fn entity_sets_agree_across_modalities() {
    common::check_modalities(&common::random_states(500, 31));
}

#[test]
fn language_mentions_every_visible_entity_count() {
    for env in random_states(100, 5) {
        let bundle = env.bundle(false);
        let n = bundle.structured.visible_entities.len();
        if n == 0 {
            assert!(!bundle.language.contains("You see:"));
        } else {
            let start = bundle.language.find("You see:").unwrap();
            let seen = &bundle.language[start..];
            let seen = &seen[..seen.find(").").unwrap() + 1];
            assert_eq!(seen.matches(" step").count(), n, "{seen}");
        }
    }
}

#[test]
fn every_mode_renders_and_text_modes_are_text() {
    let env = Env::new(TaskId::LightsOut, Difficulty::Medium, 4).unwrap();
    for mode in ObsMode::ALL {
        let o = env.observe(mode);
        assert_eq!(o.as_text().is_some(), mode.is_text(), "{mode:?}");
    }
    let frame = env.bundle(true).pixels.unwrap();
    assert_eq!((frame.width, frame.height), (512, 512));
    assert!(frame.distinct_colors().len() > 3);
    let png = frame.to_png();
    assert_eq!(&png[1..4], b"PNG");
}

#[test]
fn fog_hides_unrevealed_objects_from_every_text_modality() {
    let env = Env::new(TaskId::FogOfWarExploration, Difficulty::Expert, 8).unwrap();
    let vis = env.visibility().unwrap();
    assert!(vis.iter().filter(|v| **v).count() <= 9);
    let bundle = env.bundle(false);
    for e in &bundle.structured.visible_entities {
        let i = (e.position[1] * env.state().width + e.position[0]) as usize;
        assert!(vis[i]);
    }
    assert!(bundle.ascii.contains('?'));
}
