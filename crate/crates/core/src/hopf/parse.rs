//! Text format for custom presentations:
//!
//! ```text
//! # comment
//! tau0 1 0
//! xi1 2 1 trunc=4
//! sq tau0 = tau xi1
//! ```
//!
//! Generator names must be `zetaK`, `xiK` or `tauK` (the Greek letters are
//! accepted too) so that the standard coproduct applies. A presentation with
//! a `sq` line is motivic; otherwise it is weighted if any weight is nonzero
//! and classical if not.

use super::{GenKind, Generator, Grading, HopfPresentation};
use crate::{Error, Result};

fn kind_of(name: &str) -> Option<GenKind> {
    let families: [(&str, fn(u32) -> GenKind); 6] = [
        ("zeta", GenKind::Zeta),
        ("ζ", GenKind::Zeta),
        ("xi", GenKind::Xi),
        ("ξ", GenKind::Xi),
        ("tau", GenKind::Tau),
        ("τ", GenKind::Tau),
    ];
    for (prefix, make) in families {
        if let Some(rest) = name.strip_prefix(prefix) {
            let rest = rest.strip_prefix('_').unwrap_or(rest);
            if let Ok(k) = rest.parse::<u32>() {
                let kind = make(k);
                let zero_ok = matches!(kind, GenKind::Tau(_));
                return (zero_ok || k > 0).then_some(kind);
            }
        }
    }
    None
}

pub fn parse_presentation(name: &str, text: &str) -> Result<HopfPresentation> {
    let mut gens: Vec<Generator> = Vec::new();
    let mut squares: Vec<(usize, String, String)> = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks[0] == "sq" {
            match toks.as_slice() {
                ["sq", a, "=", "tau", b] => squares.push((ln + 1, a.to_string(), b.to_string())),
                _ => return Err(Error::parse(ln + 1, "expected `sq NAME = tau NAME2`")),
            }
            continue;
        }
        if toks.len() < 3 || toks.len() > 4 {
            return Err(Error::parse(ln + 1, "expected `name degree weight [trunc=k]`"));
        }
        let kind = kind_of(toks[0])
            .ok_or_else(|| Error::parse(ln + 1, format!("generator name {:?} is not zetaK, xiK or tauK", toks[0])))?;
        let degree = toks[1].parse().map_err(|_| Error::parse(ln + 1, "bad degree"))?;
        let weight = toks[2].parse().map_err(|_| Error::parse(ln + 1, "bad weight"))?;
        let trunc = match toks.get(3) {
            None => None,
            Some(t) => Some(
                t.strip_prefix("trunc=")
                    .and_then(|k| k.parse().ok())
                    .ok_or_else(|| Error::parse(ln + 1, "expected trunc=k"))?,
            ),
        };
        gens.push(Generator { name: toks[0].to_string(), kind, degree, weight, trunc, square: None });
    }
    for (ln, a, b) in &squares {
        let ia = gens.iter().position(|g| &g.name == a).ok_or_else(|| Error::parse(*ln, format!("unknown {a}")))?;
        let ib = gens.iter().position(|g| &g.name == b).ok_or_else(|| Error::parse(*ln, format!("unknown {b}")))?;
        gens[ia].square = Some(ib);
    }
    let grading = if !squares.is_empty() {
        Grading::Motivic
    } else if gens.iter().any(|g| g.weight != 0) {
        Grading::Weighted
    } else {
        Grading::Classical
    };
    HopfPresentation::new(name, grading, gens)
}

impl HopfPresentation {
    /// Serializes in the format read by [`parse_presentation`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for g in self.generators() {
            out.push_str(&format!("{} {} {}", g.name, g.degree, g.weight));
            if let Some(k) = g.trunc {
                out.push_str(&format!(" trunc={k}"));
            }
            out.push('\n');
        }
        for g in self.generators() {
            if let Some(j) = g.square {
                out.push_str(&format!("sq {} = tau {}\n", g.name, self.generators()[j].name));
            }
        }
        out
    }
}
