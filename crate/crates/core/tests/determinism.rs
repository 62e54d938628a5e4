use gridbench::grid::{decode_state, encode_state};
use gridbench::rng::StreamRng;
use gridbench::{reset_env, step_env, Action, Difficulty, TaskId};

fn stream(task: TaskId, difficulty: Difficulty, seed: u64, actions: &[Action]) -> (Vec<Vec<u8>>, Vec<u64>) {
    let mut state = reset_env(task, difficulty, seed).unwrap();
    let mut states = vec![encode_state(&state)];
    let mut rewards = Vec::new();
    for a in actions {
        if state.outcome.is_terminal() {
            break;
        }
        rewards.push(step_env(&mut state, *a).unwrap().reward.to_bits());
        states.push(encode_state(&state));
    }
    (states, rewards)
}

#[test]
fn independent_runs_serialize_identically() {
    let mut rng = StreamRng::new(0xD5);
    for _ in 0..50 {
        let task = TaskId::ALL[rng.index(12)];
        let difficulty = Difficulty::ALL[rng.index(4)];
        let seed = rng.next_u64();
        let len = 1 + rng.index(300);
        let actions: Vec<Action> = (0..len).map(|_| Action::ALL[rng.index(6)]).collect();
        let a = stream(task, difficulty, seed, &actions);
        let b = stream(task, difficulty, seed, &actions);
        assert_eq!(a, b, "{task}/{difficulty} seed {seed}");
        for bytes in &a.0 {
            assert_eq!(&encode_state(&decode_state(bytes).unwrap()), bytes);
        }
    }
}

#[test]
fn resuming_from_a_decoded_state_continues_identically() {
    let mut rng = StreamRng::new(77);
    for task in TaskId::ALL {
        let mut live = reset_env(task, Difficulty::Hard, 123).unwrap();
        let actions: Vec<Action> = (0..60).map(|_| Action::ALL[rng.index(6)]).collect();
        for a in &actions[..30] {
            if !live.outcome.is_terminal() {
                step_env(&mut live, *a).unwrap();
            }
        }
        let mut resumed = decode_state(&encode_state(&live)).unwrap();
        for a in &actions[30..] {
            if live.outcome.is_terminal() {
                break;
            }
            let r1 = step_env(&mut live, *a).unwrap();
            let r2 = step_env(&mut resumed, *a).unwrap();
            assert_eq!(r1, r2);
            assert_eq!(live, resumed, "{task}");
        }
    }
}
