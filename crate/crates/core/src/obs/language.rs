use super::{SeenEntity, Snapshot};
use crate::grid::{valid_actions_of, Pos};

fn article(phrase: &str) -> &'static str {
    match phrase.chars().next() {
        Some('a' | 'e' | 'i' | 'o' | 'u') => "an",
        _ => "a",
    }
}

/// Noun phrase without the article, e.g. "closed gold door".
fn noun(e: &SeenEntity) -> String {
    let mut words: Vec<String> = Vec::new();
    match (e.kind.as_str(), e.state.as_deref()) {
        ("door", Some(s)) => words.push(s.to_string()),
        ("light", Some("on")) => words.push("lit".into()),
        ("light", Some("off")) => words.push("dark".into()),
        ("tile", Some(s)) => words.push(s.to_string()),
        ("node", Some("uncolored")) => words.push("uncolored".into()),
        _ => {}
    }
    if let Some(c) = &e.color {
        words.push(c.clone());
    }
    words.push(e.kind.clone());
    match (e.kind.as_str(), e.state.as_deref()) {
        ("node", Some(s)) if s.starts_with("color_") => words.push(format!("with color {}", &s[6..])),
        ("box", Some("on_target")) => words.push("on a target".into()),
        _ => {}
    }
    words.join(" ")
}

/// Where `target` lies relative to the agent's heading.
pub(crate) fn relative_direction(snap: &Snapshot<'_>, target: Pos) -> &'static str {
    let a = &snap.state.agent;
    let (dx, dy) = (target.x - a.position.x, target.y - a.position.y);
    if (dx, dy) == (0, 0) {
        return "underfoot";
    }
    let (fx, fy) = a.orientation.delta();
    let (rx, ry) = a.orientation.right().delta();
    let forward = dx * fx + dy * fy;
    let right = dx * rx + dy * ry;
    if forward.abs() >= right.abs() {
        if forward > 0 {
            "ahead"
        } else {
            "behind"
        }
    } else if right > 0 {
        "to your right"
    } else {
        "to your left"
    }
}

fn region(snap: &Snapshot<'_>) -> String {
    let s = snap.state;
    let p = s.agent.position;
    let third = |v: i32, n: i32| {
        if 3 * v < n {
            0
        } else if 3 * v >= 2 * n {
            2
        } else {
            1
        }
    };
    let ns = ["northern", "", "southern"][third(p.y, s.height)];
    let we = ["western", "", "eastern"][third(p.x, s.width)];
    let size = format!("{}x{} room", s.width, s.height);
    match (ns.is_empty(), we.is_empty()) {
        (true, true) => format!("You are in the center of a {size}."),
        (false, true) => format!("You are near the {ns} edge of a {size}."),
        (true, false) => format!("You are near the {we} edge of a {size}."),
        (false, false) => format!("You are near the {}-{} corner of a {size}.", &ns[..5], we),
    }
}

pub fn render_language(snap: &Snapshot<'_>) -> String {
    let s = snap.state;
    let mut out = region(snap);
    out.push_str(&format!(" You are facing {}.", s.agent.orientation.name()));
    let seen = snap.seen_entities();
    if seen.is_empty() {
        out.push_str(" You see nothing else.");
    } else {
        let items: Vec<String> = seen
            .iter()
            .map(|e| {
                let n = noun(e);
                let pos = Pos::new(e.position[0], e.position[1]);
                let unit = if e.distance == 1 { "step" } else { "steps" };
                format!("{} {n} {} ({} {unit})", article(&n), relative_direction(snap, pos), e.distance)
            })
            .collect();
        out.push_str(&format!(" You see: {}.", items.join(", ")));
    }
    if s.agent.inventory.is_empty() {
        out.push_str(" Your inventory is empty.");
    } else {
        let items: Vec<String> = s
            .agent
            .inventory
            .iter()
            .map(|it| {
                let d = it.describe();
                format!("{} {d}", article(&d))
            })
            .collect();
        out.push_str(&format!(" Your inventory contains: {}.", items.join(", ")));
    }
    let names: Vec<&str> = valid_actions_of(s).iter().map(|a| a.name()).collect();
    out.push_str(&format!(" Actions: {}.", names.join(", ")));
    out
}
