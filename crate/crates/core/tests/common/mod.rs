#![allow(dead_code)]

use std::collections::BTreeSet;

use gridbench::grid::{meta, Color};
use gridbench::obs::{export_state_layers, object_state, parse_ascii, StateLayers};
use gridbench::rng::StreamRng;
use gridbench::{random_act, reset_env, step_env, ApiView, Difficulty, Env, GridState, ObjectKind, TaskId};

/// Distances by repeated relaxation over the raw exported layers, sharing no
/// code with the engine's walkability or search.
pub fn brute_force_distances(state: &GridState) -> Vec<Option<u32>> {
    let l = export_state_layers(state);
    let (w, h) = (l.width, l.height);
    let open = |x: i32, y: i32| -> bool {
        let i = (y * w + x) as usize;
        let closed_door = l.objects[i] == 3 && l.metadata[i] & 0x10 == 0;
        let solid = matches!(l.objects[i], 4 | 7);
        l.terrain[i] != 1 && !closed_door && !solid && l.agents[i] < 2
    };
    let mut dist: Vec<Option<u32>> = vec![None; (w * h) as usize];
    dist[(l.position[1] * w + l.position[0]) as usize] = Some(0);
    loop {
        let mut changed = false;
        for y in 0..h {
            for x in 0..w {
                if !open(x, y) {
                    continue;
                }
                let best = [(0, -1), (0, 1), (-1, 0), (1, 0)]
                    .iter()
                    .filter_map(|(dx, dy)| {
                        let (nx, ny) = (x + dx, y + dy);
                        (nx >= 0 && ny >= 0 && nx < w && ny < h).then(|| dist[(ny * w + nx) as usize]).flatten()
                    })
                    .min()
                    .map(|d| d + 1);
                let i = (y * w + x) as usize;
                if let Some(b) = best {
                    if dist[i].is_none_or(|d| b < d) {
                        dist[i] = Some(b);
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return dist;
        }
    }
}

/// Tasks whose world stands still while the agent walks an empty-handed path.
pub fn static_world(task: TaskId) -> bool {
    !matches!(task, TaskId::DynamicObstacles | TaskId::TagHunt | TaskId::Herding | TaskId::SequenceMemory)
}

/// Compare `path_to` against brute force on `layouts` generated layouts and
/// walk a sample of the paths in static worlds. Returns the number of cells compared.
pub fn check_pathfinding(layouts: u64, seed: u64) -> usize {
    let mut rng = StreamRng::new(seed);
    let mut checked = 0;
    for n in 0..layouts {
        let task = TaskId::ALL[(n % 12) as usize];
        let difficulty = Difficulty::ALL[((n / 12) % 4) as usize];
        let mut state = reset_env(task, difficulty, n * 31 + 7).unwrap();
        for _ in 0..rng.below(15) {
            if state.outcome.is_terminal() {
                break;
            }
            step_env(&mut state, random_act(&mut rng)).unwrap();
        }
        let dist = brute_force_distances(&state);
        let api = ApiView::new(&state);
        for (i, expected) in dist.iter().enumerate() {
            let p = state.pos_of(i);
            let path = api.path_to(p.x, p.y).unwrap();
            assert_eq!(path.as_ref().map(|p| p.len() as u32), *expected, "{task}/{difficulty} seed {} cell {p:?}", n * 31 + 7);
            checked += 1;
            if let (Some(path), true, true) = (path, static_world(task), i % 7 == 0) {
                let mut s = state.clone();
                for a in &path {
                    if s.outcome.is_terminal() {
                        break;
                    }
                    step_env(&mut s, *a).unwrap();
                }
                assert!(s.agent.position == p || s.outcome.is_terminal(), "{task}: path to {p:?} ended at {:?}", s.agent.position);
            }
        }
    }
    checked
}

pub type Identity = (String, [i32; 2], Option<String>, Option<String>);

pub fn from_layers(l: &StateLayers, visible: Option<&[bool]>) -> BTreeSet<Identity> {
    let mut out = BTreeSet::new();
    for y in 0..l.height {
        for x in 0..l.width {
            let i = (y * l.width + x) as usize;
            if visible.is_some_and(|v| !v[i]) {
                continue;
            }
            let kind = ObjectKind::from_code(l.objects[i]).unwrap();
            if kind != ObjectKind::None {
                let m = l.metadata[i] as u16;
                let color = meta::color(m);
                out.insert((
                    kind.name().to_string(),
                    [x, y],
                    (color != Color::None).then(|| color.name().to_string()),
                    object_state(kind, m),
                ));
            }
            if l.agents[i] >= 2 {
                let kind = l.entity_kinds[(l.agents[i] - 2) as usize].expect("live entity");
                out.insert((kind.name().to_string(), [x, y], None, None));
            }
        }
    }
    out
}

pub fn random_states(n: usize, seed: u64) -> Vec<Env> {
    let mut rng = StreamRng::new(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let task = TaskId::ALL[rng.index(12)];
        let difficulty = Difficulty::ALL[rng.index(4)];
        let mut env = Env::new(task, difficulty, rng.next_u64()).unwrap();
        let steps = rng.index(env.state().max_steps as usize / 2);
        for _ in 0..steps {
            if env.is_done() {
                break;
            }
            env.act(random_act(&mut rng)).unwrap();
        }
        out.push(env);
    }
    out
}

/// Entity sets parsed from ascii, structured and layer observations must agree.
pub fn check_modalities(states: &[Env]) {
    for env in states {
        let bundle = env.bundle(false);
        let ascii: BTreeSet<Identity> =
            parse_ascii(&bundle.ascii).unwrap().entities().iter().map(|e| e.identity()).collect();
        let structured: BTreeSet<Identity> = bundle.structured.visible_entities.iter().map(|e| e.identity()).collect();
        let layers = from_layers(&bundle.state_layers, env.visibility());
        let s = env.state();
        assert_eq!(ascii, structured, "{}/{} seed {} step {}\n{}", s.task, s.difficulty, s.seed, s.step_count, bundle.ascii);
        assert_eq!(layers, structured, "{}/{} seed {} step {}", s.task, s.difficulty, s.seed, s.step_count);
        let parsed = parse_ascii(&bundle.ascii).unwrap();
        assert_eq!(parsed.agent, s.agent.position);
        assert_eq!(bundle.structured.position.x, s.agent.position.x);
    }
}

