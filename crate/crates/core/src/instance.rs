//! Line-oriented instance files.
//!
//! ```text
//! geomis-instance v1
//! dim 3                      # or `dim -` for an abstract graph
//! ball <x1> ... <xd> <radius>
//! rect <l1> <u1> ... <ld> <ud>
//! vertex <id> <comma-separated earlier ids, or ->
//! ```
//!
//! One arrival per line, in order; `#` starts a comment. Geometric lines get
//! their adjacency from the intersection predicate on load, `vertex` lines
//! carry it explicitly. Numbers are written in Rust's shortest round-trip
//! form, so save followed by load reproduces every coordinate bit for bit.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{Ball, HyperRectangle, Point, Shape, SizedObject};
use crate::online::{ArrivalEvent, ArrivalSequence, Decision};

pub const HEADER: &str = "geomis-instance v1";

pub fn format_instance(stream: &ArrivalSequence) -> String {
    format_annotated(stream, None)
}

/// Like [`format_instance`], with each arrival's decision as a trailing
/// comment (used for adversary transcripts).
pub fn format_transcript(stream: &ArrivalSequence, decisions: &[Decision]) -> String {
    format_annotated(stream, Some(decisions))
}

fn format_annotated(stream: &ArrivalSequence, decisions: Option<&[Decision]>) -> String {
    let mut out = String::new();
    out.push_str(HEADER);
    out.push('\n');
    match (stream.is_geometric(), stream.dim()) {
        (true, Some(d)) => writeln!(out, "dim {d}").unwrap(),
        _ => out.push_str("dim -\n"),
    }
    for e in stream.events() {
        match &e.payload {
            Some(obj) => match obj.shape() {
                Shape::Ball(b) => {
                    out.push_str("ball");
                    for x in b.center().coords() {
                        write!(out, " {x}").unwrap();
                    }
                    write!(out, " {}", b.radius()).unwrap();
                }
                Shape::Rect(r) => {
                    out.push_str("rect");
                    for (l, u) in r.lo().coords().iter().zip(r.hi().coords()) {
                        write!(out, " {l} {u}").unwrap();
                    }
                }
            },
            None => {
                write!(out, "vertex {} ", e.id).unwrap();
                if e.neighbors.is_empty() {
                    out.push('-');
                } else {
                    let ids: Vec<String> = e.neighbors.iter().map(usize::to_string).collect();
                    out.push_str(&ids.join(","));
                }
            }
        }
        if let Some(d) = decisions.and_then(|ds| ds.get(e.id)) {
            out.push_str(match d {
                Decision::Accept => "  # accept",
                Decision::Reject => "  # reject",
            });
        }
        out.push('\n');
    }
    out
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_f64(tok: &str, line: usize) -> Result<f64> {
    let x: f64 = tok
        .parse()
        .map_err(|_| parse_err(line, format!("invalid number `{tok}`")))?;
    if !x.is_finite() {
        return Err(parse_err(line, format!("non-finite number `{tok}`")));
    }
    Ok(x)
}

fn parse_id(tok: &str, line: usize) -> Result<usize> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("invalid vertex id `{tok}`")))
}

enum Body {
    Unknown,
    Geometric(Vec<SizedObject>),
    Abstract(Vec<ArrivalEvent>),
}

pub fn parse_instance(text: &str) -> Result<ArrivalSequence> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (n, header) = lines.next().ok_or_else(|| parse_err(1, "empty instance file"))?;
    if header.split_whitespace().collect::<Vec<_>>() != ["geomis-instance", "v1"] {
        return Err(parse_err(n, format!("expected header `{HEADER}`")));
    }
    let (n, dim_line) = lines.next().ok_or_else(|| parse_err(n, "missing `dim` line"))?;
    let dim = match dim_line.split_whitespace().collect::<Vec<_>>()[..] {
        ["dim", "-"] => None,
        ["dim", d] => match d.parse::<usize>() {
            Ok(d) if d >= 1 => Some(d),
            _ => return Err(parse_err(n, format!("invalid dimension `{d}`"))),
        },
        _ => return Err(parse_err(n, "expected `dim <d>` or `dim -`")),
    };

    let mut body = Body::Unknown;
    for (n, line) in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks[0] {
            "ball" | "rect" => {
                let d = dim.ok_or_else(|| parse_err(n, "geometric arrival in an abstract (`dim -`) instance"))?;
                let nums = toks[1..].iter().map(|t| parse_f64(t, n)).collect::<Result<Vec<_>>>()?;
                let obj = if toks[0] == "ball" {
                    if nums.len() != d + 1 {
                        return Err(parse_err(
                            n,
                            format!("ball needs {} numbers, found {}", d + 1, nums.len()),
                        ));
                    }
                    let center = Point::new(nums[..d].to_vec()).map_err(|e| parse_err(n, e.to_string()))?;
                    Ball::new(center, nums[d])
                        .map(SizedObject::ball)
                        .map_err(|e| parse_err(n, e.to_string()))?
                } else {
                    if nums.len() != 2 * d {
                        return Err(parse_err(
                            n,
                            format!("rect needs {} numbers, found {}", 2 * d, nums.len()),
                        ));
                    }
                    let lo = nums.iter().step_by(2).copied().collect();
                    let hi = nums.iter().skip(1).step_by(2).copied().collect();
                    let rect = Point::new(lo)
                        .and_then(|lo| HyperRectangle::new(lo, Point::new(hi)?))
                        .map_err(|e| parse_err(n, e.to_string()))?;
                    SizedObject::rect(rect)
                };
                match &mut body {
                    Body::Unknown => body = Body::Geometric(vec![obj]),
                    Body::Geometric(objs) => {
                        if std::mem::discriminant(objs[0].shape()) != std::mem::discriminant(obj.shape()) {
                            return Err(parse_err(n, "mixing balls and rectangles is not supported"));
                        }
                        objs.push(obj);
                    }
                    Body::Abstract(_) => return Err(parse_err(n, "geometric arrival after `vertex` lines")),
                }
            }
            "vertex" => {
                if dim.is_some() {
                    return Err(parse_err(n, "`vertex` line in a geometric instance (use `dim -`)"));
                }
                if toks.len() != 3 {
                    return Err(parse_err(n, "expected `vertex <id> <ids or ->`"));
                }
                if matches!(body, Body::Unknown) {
                    body = Body::Abstract(Vec::new());
                }
                let Body::Abstract(events) = &mut body else {
                    unreachable!("geometric lines need a dimension")
                };
                let id = parse_id(toks[1], n)?;
                if id != events.len() {
                    return Err(parse_err(n, format!("expected vertex id {}, found {id}", events.len())));
                }
                let neighbors = if toks[2] == "-" {
                    Vec::new()
                } else {
                    toks[2].split(',').map(|t| parse_id(t, n)).collect::<Result<Vec<_>>>()?
                };
                if let Some(&bad) = neighbors.iter().find(|&&u| u >= id) {
                    return Err(parse_err(
                        n,
                        format!("vertex {id} references {bad}, which has not arrived yet"),
                    ));
                }
                events.push(ArrivalEvent {
                    id,
                    neighbors,
                    payload: None,
                });
            }
            other => return Err(parse_err(n, format!("unknown record `{other}`"))),
        }
    }

    match body {
        Body::Unknown => ArrivalSequence::new(dim, Vec::new()),
        Body::Abstract(events) => ArrivalSequence::new(None, events),
        Body::Geometric(objects) => ArrivalSequence::from_objects(objects),
    }
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<ArrivalSequence> {
    parse_instance(&fs::read_to_string(path)?)
}

pub fn save_instance(stream: &ArrivalSequence, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, format_instance(stream))?;
    Ok(())
}
