//! Conventional names for Ext classes of the preset algebras.
//!
//! A dictionary maps degrees to names and is consulted only for
//! one-dimensional groups. Everything else is named `{f-i}`, with `f` the
//! filtration and `i` a running index per filtration in degree order.

use std::collections::{BTreeMap, HashMap};

use crate::hopf::{Preset, TriDegree};
use crate::oracle;

/// `h1^2c0g^3` style product names; zero exponents are skipped.
pub fn product_name(factors: &[(&str, i32)]) -> String {
    let mut s = String::new();
    for &(n, e) in factors {
        match e {
            0 => {}
            1 => s.push_str(n),
            _ => s.push_str(&format!("{n}^{e}")),
        }
    }
    if s.is_empty() {
        "1".into()
    } else {
        s
    }
}

struct Dict {
    map: HashMap<TriDegree, String>,
}

impl Dict {
    fn new() -> Self {
        Dict { map: HashMap::new() }
    }

    /// First entry for a degree wins.
    fn add(&mut self, d: TriDegree, name: String) {
        self.map.entry(d).or_insert(name);
    }
}

/// `h_j` for every primitive of the presentation.
fn primitive_names(dict: &mut Dict, algebra: &str, max_t: i32) {
    let base = algebra.strip_suffix("/tau").unwrap_or(algebra);
    let Ok(preset) = base.parse::<Preset>() else { return };
    let mut p = preset.build();
    if base != algebra {
        p = p.mod_tau();
    }
    for (name, m) in p.primitives(max_t) {
        let (t, w) = p.degree(&m);
        dict.add(TriDegree::new(t - 1, 1, w), name);
    }
}

fn classical_dictionary(dict: &mut Dict, max_stem: i32, max_f: i32) {
    let c = TriDegree::classical;
    dict.add(c(0, 0), "1".into());
    for k in 1..=max_f {
        dict.add(c(0, k), product_name(&[("h0", k)]));
    }
    let mut j = 1;
    while (1 << j) - 1 <= max_stem {
        dict.add(c((1 << j) - 1, 1), format!("h{j}"));
        j += 1;
    }
    for (j, top) in [(2, 2), (3, 3), (4, 7), (5, 15)] {
        let hj = format!("h{j}");
        for k in 1..=top {
            dict.add(c((1 << j) - 1, 1 + k), product_name(&[("h0", k), (&hj, 1)]));
        }
    }
    for i in 1..8 {
        for j in i..8 {
            if j == i + 1 {
                continue;
            }
            let s = (1 << i) + (1 << j) - 2;
            let name = if i == j { format!("h{i}^2") } else { format!("h{i}h{j}") };
            dict.add(c(s, 2), name);
        }
    }
    for (name, s, f) in [("c0", 8, 3), ("h1c0", 9, 4), ("c1", 19, 3), ("d0", 14, 4), ("e0", 17, 4), ("f0", 18, 4), ("g", 20, 4)] {
        dict.add(c(s, f), name.into());
    }
    for k in 1..=(max_stem / 8 + 1) {
        let p = ("P", k);
        let (s, f) = (8 * k, 4 * k);
        dict.add(c(s + 1, f + 1), product_name(&[p, ("h1", 1)]));
        dict.add(c(s + 3, f + 1), product_name(&[p, ("h2", 1)]));
        dict.add(c(s + 3, f + 2), product_name(&[p, ("h0", 1), ("h2", 1)]));
        dict.add(c(s + 3, f + 3), product_name(&[p, ("h0", 2), ("h2", 1)]));
        dict.add(c(s + 2, f + 2), product_name(&[p, ("h1", 2)]));
        dict.add(c(s + 8, f + 3), product_name(&[p, ("c0", 1)]));
        dict.add(c(s + 9, f + 4), product_name(&[p, ("h1", 1), ("c0", 1)]));
        dict.add(c(s + 7, f + 3), product_name(&[p, ("h0", 2), ("h3", 1)]));
        dict.add(c(s + 14, f + 4), product_name(&[p, ("d0", 1)]));
        dict.add(c(s + 17, f + 4), product_name(&[p, ("e0", 1)]));
    }
}

fn ring_dictionary(dict: &mut Dict, ring: &oracle::QuotientRing, max_f: i32, keep: impl Fn(TriDegree) -> bool) {
    for (d, names) in ring.standard_monomials(max_f, keep) {
        if let [name] = names.as_slice() {
            dict.add(d, name.clone());
        }
    }
}

/// The Chow-degree-one families of motivic `A(2)`.
fn a2_chow1_dictionary(dict: &mut Dict, max_coweight: i32) {
    let mut k = 0;
    while 8 * k <= max_coweight {
        let g = ("g", k);
        dict.add(TriDegree::new(20 * k, 4 * k + 1, 12 * k), product_name(&[("h0", 1), g]));
        dict.add(TriDegree::new(20 * k + 3, 4 * k + 2, 12 * k + 2), product_name(&[("h0", 1), ("h2", 1), g]));
        for j in 0..=(max_coweight - 8 * k).max(0) {
            let h1 = ("h1", j);
            dict.add(TriDegree::new(8 + j + 20 * k, 3 + j + 4 * k, 5 + j + 12 * k), product_name(&[h1, ("c0", 1), g]));
            dict.add(TriDegree::new(17 + j + 20 * k, 4 + j + 4 * k, 10 + j + 12 * k), product_name(&[h1, ("e0", 1), g]));
        }
        k += 1;
    }
}

fn dictionary(algebra: &str, max_stem: i32, max_f: i32) -> Dict {
    let mut dict = Dict::new();
    let max_t = max_stem + max_f + 1;
    match algebra {
        "Acl" => classical_dictionary(&mut dict, max_stem, max_f),
        "Acl1" => ring_dictionary(&mut dict, &oracle::acl1_ring(), max_f, |d| d.s <= max_stem),
        "B2" | "A2mot" | "A2mot/tau" => {
            // Coweight of a Chow-degree-zero class is `s - w`, at most the stem.
            ring_dictionary(&mut dict, &oracle::a2_chow0_ring(), max_f, |d| d.s <= max_stem);
            if algebra != "B2" {
                a2_chow1_dictionary(&mut dict, max_stem);
            }
        }
        _ => {}
    }
    primitive_names(&mut dict, algebra, max_t);
    dict
}

/// Names for every basis element of the groups in `dims`.
pub fn assign_names(algebra: &str, dims: &BTreeMap<TriDegree, usize>) -> BTreeMap<TriDegree, Vec<String>> {
    let max_stem = dims.keys().map(|d| d.s).max().unwrap_or(0);
    let max_f = dims.keys().map(|d| d.f).max().unwrap_or(0);
    let dict = dictionary(algebra, max_stem, max_f);
    let mut counters: HashMap<i32, usize> = HashMap::new();
    let mut out = BTreeMap::new();
    for (&d, &n) in dims {
        if n == 0 {
            continue;
        }
        let names = match dict.map.get(&d) {
            Some(name) if n == 1 => vec![name.clone()],
            _ => (0..n)
                .map(|_| {
                    let c = counters.entry(d.f).or_insert(0);
                    *c += 1;
                    format!("{{{}-{}}}", d.f, c)
                })
                .collect(),
        };
        out.insert(d, names);
    }
    out
}
