use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::sync::{Arc, Mutex};
use std::time::Duration;

use gridbench::eval::{run_episode, EpisodeOptions, NoopPolicy, OraclePolicy};
use gridbench::{Action, Difficulty, Env, ObsMode, TaskId};
use gridbench_harness::{
    BackendError, ChatBackend, HarnessAgent, HarnessConfig, HttpChatBackend, Message, Preset, Role, Sampling,
    ScriptedBackend,
};

fn reasoner_replies(actions: &[Action]) -> Vec<String> {
    actions.iter().map(|a| format!("The plan says {}.\nACTION: {}", a.name(), a.code())).collect()
}

#[test]
fn scripted_oracle_replay_matches_oracle_returns() {
    for task in TaskId::ALL {
        for difficulty in [Difficulty::Easy, Difficulty::Medium] {
            let oracle = run_episode(&mut OraclePolicy::new(), task, difficulty, 11, EpisodeOptions::default()).unwrap();
            let backend = Arc::new(ScriptedBackend::sequence(reasoner_replies(&oracle.actions())));
            let mut agent = HarnessAgent::new(HarnessConfig::default(), backend);
            let replay = run_episode(&mut agent, task, difficulty, 11, EpisodeOptions::default()).unwrap();
            assert_eq!(replay.rewards(), oracle.rewards(), "{task}/{difficulty}");
            assert_eq!(replay.parse_failures(), 0);
            assert!(replay.success);
        }
    }
}

#[test]
fn always_noop_backend_equals_noop_policy() {
    let backend = Arc::new(ScriptedBackend::fixed("ACTION: 0"));
    let mut agent = HarnessAgent::new(HarnessConfig::default(), backend);
    let opts = EpisodeOptions::default();
    let a = run_episode(&mut agent, TaskId::KeyDoorPuzzle, Difficulty::Easy, 3, opts).unwrap();
    let b = run_episode(&mut NoopPolicy, TaskId::KeyDoorPuzzle, Difficulty::Easy, 3, opts).unwrap();
    assert_eq!(a.actions(), b.actions());
    assert_eq!(a.rewards(), b.rewards());
    assert_eq!(a.steps.iter().map(|s| &s.obs_ascii).collect::<Vec<_>>(), b.steps.iter().map(|s| &s.obs_ascii).collect::<Vec<_>>());
}

#[test]
fn missing_marker_degrades_to_flagged_noops() {
    let backend = Arc::new(ScriptedBackend::fixed("I would go up, probably 1."));
    let mut agent = HarnessAgent::new(HarnessConfig::default(), backend);
    let rec = run_episode(&mut agent, TaskId::GoToGoal, Difficulty::Easy, 4, EpisodeOptions::default()).unwrap();
    assert_eq!(rec.steps.len(), 100);
    assert_eq!(rec.parse_failures(), 100);
    assert!(rec.actions().iter().all(|a| *a == Action::Noop));
    assert!(rec.fault.is_none());
}

#[test]
fn prompts_depend_only_on_the_current_observation() {
    let seen: Arc<Mutex<Vec<Vec<Message>>>> = Arc::default();
    let log = seen.clone();
    let backend = Arc::new(ScriptedBackend::callback(move |m| {
        log.lock().unwrap().push(m.to_vec());
        "ACTION: 0".into()
    }));
    for preset in [Preset::Markovian, Preset::MarkovianReasoner] {
        for obs_mode in [ObsMode::Ascii, ObsMode::Language] {
            seen.lock().unwrap().clear();
            let cfg = HarnessConfig { preset, obs_mode, ..HarnessConfig::default() };
            let mut agent = HarnessAgent::new(cfg, backend.clone());
            run_episode(&mut agent, TaskId::MazeNavigation, Difficulty::Easy, 9, EpisodeOptions::default()).unwrap();
            let prompts = seen.lock().unwrap();
            assert_eq!(prompts.len(), 100);
            assert!(prompts.iter().all(|p| p.len() == 2 && p[0].role == Role::System && p[1].role == Role::User));
            assert!(prompts.windows(2).all(|w| w[0] == w[1]), "{preset:?}/{obs_mode:?}");
        }
    }
}

#[test]
fn revisited_states_get_identical_prompts() {
    let cfg = HarnessConfig::default();
    let agent = HarnessAgent::new(cfg, Arc::new(ScriptedBackend::fixed("ACTION: 0")));
    let mut env = Env::new(TaskId::GoToGoal, Difficulty::Hard, 2).unwrap();
    let before = agent.prompt_for(&env);
    let moves = [Action::MoveUp, Action::MoveDown, Action::MoveLeft, Action::MoveRight];
    let (go, back) = moves
        .iter()
        .flat_map(|&a| moves.iter().map(move |&b| (a, b)))
        .find(|(a, b)| {
            let mut probe = env.clone();
            let start = probe.state().agent.position;
            probe.act(*a).unwrap();
            probe.state().agent.position != start && !probe.is_done() && {
                probe.act(*b).unwrap();
                probe.state().agent.position == start && probe.state().agent.orientation == env.state().agent.orientation
            }
        })
        .expect("some move can be undone");
    env.act(go).unwrap();
    env.act(back).unwrap();
    assert_eq!(agent.prompt_for(&env), before);
}

/// Minimal HTTP/1.1 server answering each connection with the next canned reply.
fn serve(replies: Vec<(u16, String)>) -> (String, Arc<Mutex<Vec<String>>>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/v1/chat/completions", listener.local_addr().unwrap());
    let bodies: Arc<Mutex<Vec<String>>> = Arc::default();
    let log = bodies.clone();
    std::thread::spawn(move || {
        for (status, reply) in replies {
            let (mut stream, _) = listener.accept().unwrap();
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut length = 0usize;
            loop {
                let mut line = String::new();
                reader.read_line(&mut line).unwrap();
                if line == "\r\n" || line.is_empty() {
                    break;
                }
                if let Some(v) = line.to_ascii_lowercase().strip_prefix("content-length:") {
                    length = v.trim().parse().unwrap();
                }
            }
            let mut body = vec![0u8; length];
            reader.read_exact(&mut body).unwrap();
            log.lock().unwrap().push(String::from_utf8(body).unwrap());
            let head = format!(
                "HTTP/1.1 {status} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n",
                reply.len()
            );
            stream.write_all(head.as_bytes()).unwrap();
            stream.write_all(reply.as_bytes()).unwrap();
        }
    });
    (url, bodies)
}

fn user(text: &str) -> Vec<Message> {
    vec![Message::new(Role::User, text)]
}

const OK: &str = r#"{"choices":[{"message":{"role":"assistant","content":"ACTION: 2"}}]}"#;

#[test]
fn http_backend_sends_sampling_and_reads_first_choice() {
    let (url, bodies) = serve(vec![(200, OK.into())]);
    let b = HttpChatBackend::new(url, Some("secret".into()), "qwen").with_backoff(Duration::from_millis(1));
    let s = Sampling { temperature: 0.7, top_p: 0.8, top_k: None, max_tokens: 100 };
    assert_eq!(b.chat(&user("hi"), &s).unwrap().content, "ACTION: 2");
    let sent: serde_json::Value = serde_json::from_str(&bodies.lock().unwrap()[0]).unwrap();
    assert_eq!(sent["model"], "qwen");
    assert_eq!(sent["temperature"], 0.7);
    assert_eq!(sent["top_p"], 0.8);
    assert_eq!(sent["max_tokens"], 100);
    assert!(sent.get("top_k").is_none());
}

#[test]
fn malformed_bodies_fail_after_three_attempts() {
    let (url, bodies) = serve(vec![(200, "{\"nope\":1}".into()); 3]);
    let b = HttpChatBackend::new(url, None, "m").with_backoff(Duration::from_millis(1));
    let err = b.chat(&user("hi"), &Sampling::default()).unwrap_err();
    assert!(matches!(err, BackendError::Malformed { attempts: 3, .. }), "{err}");
    assert_eq!(bodies.lock().unwrap().len(), 3);
}

#[test]
fn transient_errors_are_retried() {
    let (url, bodies) = serve(vec![(503, "busy".into()), (200, OK.into())]);
    let b = HttpChatBackend::new(url, None, "m").with_backoff(Duration::from_millis(1));
    assert_eq!(b.chat(&user("hi"), &Sampling::default()).unwrap().content, "ACTION: 2");
    assert_eq!(bodies.lock().unwrap().len(), 2);
}

#[test]
fn client_errors_are_not_retried() {
    let (url, bodies) = serve(vec![(404, "no such route".into())]);
    let b = HttpChatBackend::new(url, None, "m").with_backoff(Duration::from_millis(1));
    let err = b.chat(&user("hi"), &Sampling::default()).unwrap_err();
    assert!(matches!(err, BackendError::Unavailable { attempts: 1, .. }), "{err}");
    assert_eq!(bodies.lock().unwrap().len(), 1);
}

#[test]
fn top_k_is_dropped_once_rejected() {
    let (url, bodies) = serve(vec![
        (400, r#"{"error":"unknown field top_k"}"#.into()),
        (200, OK.into()),
        (200, OK.into()),
    ]);
    let b = HttpChatBackend::new(url, None, "m").with_backoff(Duration::from_millis(1));
    let s = Sampling::default();
    b.chat(&user("a"), &s).unwrap();
    b.chat(&user("b"), &s).unwrap();
    let bodies = bodies.lock().unwrap();
    assert!(bodies[0].contains("top_k"));
    assert!(!bodies[1].contains("top_k") && !bodies[2].contains("top_k"));
}

#[test]
fn unreachable_endpoint_surfaces_as_agent_fault() {
    let dead = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/", dead.local_addr().unwrap());
    drop(dead);
    let backend = Arc::new(HttpChatBackend::new(url, None, "m").with_backoff(Duration::from_millis(1)));
    let mut agent = HarnessAgent::new(HarnessConfig::default(), backend);
    let rec = run_episode(&mut agent, TaskId::GoToGoal, Difficulty::Easy, 0, EpisodeOptions::default()).unwrap();
    assert!(rec.fault.as_deref().unwrap().contains("unavailable"));
    assert!(rec.actions().iter().all(|a| *a == Action::Noop));
}
