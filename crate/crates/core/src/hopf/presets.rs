use std::fmt;
use std::str::FromStr;

use super::{GenKind, Generator, Grading, HopfPresentation};
use crate::Error;

/// Highest generator index kept in the infinite presets. Internal degrees in
/// this crate stay far below `2^MAX_INDEX`.
const MAX_INDEX: u32 = 8;

/// The built-in presentations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Preset {
    /// Classical `A^cl_* = F2[ζ_1, ζ_2, ...]`.
    Acl,
    /// `A^cl(1)_* = F2[ζ_1, ζ_2]/(ζ_1^4, ζ_2^2)`.
    Acl1,
    /// `A^cl(2)_* = F2[ζ_1, ζ_2, ζ_3]/(ζ_1^8, ζ_2^4, ζ_3^2)`.
    Acl2,
    /// Motivic `A_** = F2[τ][τ_i, ξ_j]/(τ_i^2 = τ ξ_{i+1})`.
    Amot,
    /// Motivic `A(1)_** = F2[τ][τ_0, τ_1, ξ_1]/(τ_0^2 + τξ_1, ξ_1^2, τ_1^2)`.
    A1mot,
    /// Motivic `A(2)_** = F2[τ][τ_0, τ_1, τ_2, ξ_1, ξ_2]/(τ_0^2 + τξ_1, ξ_1^4, τ_1^2 + τξ_2, ξ_2^2, τ_2^2)`.
    A2mot,
    /// `B_** = F2[ξ_1, ξ_2, ...]` over F2.
    B,
    /// `B(2)_* = F2[ξ_1, ξ_2]/(ξ_1^4, ξ_2^2)`.
    B2,
}

pub const ALL_PRESETS: [Preset; 8] =
    [Preset::Acl, Preset::Acl1, Preset::Acl2, Preset::Amot, Preset::A1mot, Preset::A2mot, Preset::B, Preset::B2];

fn zeta(k: u32, trunc: Option<u32>) -> Generator {
    Generator { name: format!("zeta{k}"), kind: GenKind::Zeta(k), degree: (1 << k) - 1, weight: 0, trunc, square: None }
}

fn xi(j: u32, trunc: Option<u32>) -> Generator {
    Generator {
        name: format!("xi{j}"),
        kind: GenKind::Xi(j),
        degree: (1 << (j + 1)) - 2,
        weight: (1 << j) - 1,
        trunc,
        square: None,
    }
}

fn tau(i: u32, trunc: Option<u32>, square: Option<usize>) -> Generator {
    Generator {
        name: format!("tau{i}"),
        kind: GenKind::Tau(i),
        degree: (1 << (i + 1)) - 1,
        weight: (1 << i) - 1,
        trunc,
        square,
    }
}

/// Motivic generators `τ_0..τ_{n-1}` then `ξ_1..ξ_m`, `τ_i^2 = τξ_{i+1}` where
/// the relation is listed in `squares`.
fn motivic(ntau: u32, xi_truncs: &[Option<u32>], tau_truncs: &[Option<u32>], squares: &[bool]) -> Vec<Generator> {
    let mut gens = Vec::new();
    for i in 0..ntau {
        let sq = squares[i as usize].then_some(ntau as usize + i as usize);
        gens.push(tau(i, tau_truncs[i as usize], sq));
    }
    for (j, &t) in xi_truncs.iter().enumerate() {
        gens.push(xi(j as u32 + 1, t));
    }
    gens
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Acl => "Acl",
            Preset::Acl1 => "Acl1",
            Preset::Acl2 => "Acl2",
            Preset::Amot => "Amot",
            Preset::A1mot => "A1mot",
            Preset::A2mot => "A2mot",
            Preset::B => "B",
            Preset::B2 => "B2",
        }
    }

    pub fn build(self) -> HopfPresentation {
        let (grading, gens) = match self {
            Preset::Acl => (Grading::Classical, (1..=MAX_INDEX).map(|k| zeta(k, None)).collect()),
            Preset::Acl1 => (Grading::Classical, vec![zeta(1, Some(4)), zeta(2, Some(2))]),
            Preset::Acl2 => (Grading::Classical, vec![zeta(1, Some(8)), zeta(2, Some(4)), zeta(3, Some(2))]),
            Preset::Amot => {
                let n = MAX_INDEX;
                let xis = vec![None; n as usize + 1];
                (Grading::Motivic, motivic(n, &xis, &vec![None; n as usize], &vec![true; n as usize]))
            }
            Preset::A1mot => (Grading::Motivic, motivic(2, &[Some(2)], &[None, Some(2)], &[true, false])),
            Preset::A2mot => {
                (Grading::Motivic, motivic(3, &[Some(4), Some(2)], &[None, None, Some(2)], &[true, true, false]))
            }
            Preset::B => (Grading::Weighted, (1..=MAX_INDEX).map(|j| xi(j, None)).collect()),
            Preset::B2 => (Grading::Weighted, vec![xi(1, Some(4)), xi(2, Some(2))]),
        };
        HopfPresentation::new(self.name(), grading, gens).expect("built-in presets are valid")
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        ALL_PRESETS
            .iter()
            .copied()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                let names: Vec<_> = ALL_PRESETS.iter().map(|p| p.name()).collect();
                Error::Usage(format!("unknown algebra {s:?}; expected one of {}", names.join(", ")))
            })
    }
}
