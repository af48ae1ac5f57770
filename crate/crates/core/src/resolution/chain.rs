//! Yoneda products and Massey products from chain maps and homotopies on
//! the resolution.
//!
//! A class `c` in `Ext^{f_c}` lifts to a chain map `C_n : P_{f_c+n} → P_n`
//! with `C_0(g) = c(g)·ι` and `d C_n = C_{n-1} d`. The product `x·c`
//! evaluates `x` on `C_{f_x}`. For `⟨a, b, c⟩` with `bc = 0` a homotopy
//! `H_n : P_{f_b+f_c+n} → P_{n+1}` satisfies `d H_n + H_{n-1} d = B_n C_{f_b+n}`,
//! and `a` evaluated on `H_{f_a-1}` represents the product.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use super::{sub, Deg, Layout, Region, Resolution};
use crate::chart::{Class, ExtChart, ExtEngine, MasseyCoset};
use crate::f2linalg::{image_and_kernel, BitVec, Subspace};
use crate::hopf::TriDegree;
use crate::{Error, Result};

type Key = (i32, Deg);

fn split(d: TriDegree) -> Key {
    (d.f, (d.t(), d.w))
}

/// A lazily evaluated chain map lifting one class.
pub struct ChainMap {
    f: i32,
    deg: Deg,
    coords: BitVec,
    values: Mutex<HashMap<(i32, usize), Arc<BitVec>>>,
}

struct Homotopy {
    b: Arc<ChainMap>,
    c: Arc<ChainMap>,
    values: Mutex<HashMap<(i32, usize), Arc<BitVec>>>,
}

/// Products and Massey products over a finished resolution.
pub struct ResolutionExt {
    res: Resolution,
    region: Region,
    chart: ExtChart,
    layouts: Mutex<HashMap<Key, Arc<Layout>>>,
    lifts: Mutex<HashMap<Key, Arc<Subspace>>>,
    maps: Mutex<HashMap<(TriDegree, BitVec), Arc<ChainMap>>>,
    homotopies: Mutex<HashMap<[(TriDegree, BitVec); 2], Arc<Homotopy>>>,
}

impl ResolutionExt {
    pub fn new(res: Resolution) -> Result<Self> {
        let region = res.region().ok_or_else(|| Error::Usage("resolution has not been computed".into()))?;
        let chart = res.chart()?;
        Ok(ResolutionExt {
            res,
            region,
            chart,
            layouts: Mutex::default(),
            lifts: Mutex::default(),
            maps: Mutex::default(),
            homotopies: Mutex::default(),
        })
    }

    pub fn resolution(&self) -> &Resolution {
        &self.res
    }

    pub fn into_resolution(self) -> Resolution {
        self.res
    }

    fn check(&self, d: TriDegree) -> Result<()> {
        if self.region.contains_degree(d) {
            Ok(())
        } else {
            Err(Error::Range(format!("{d} lies outside the resolved region")))
        }
    }

    fn check_class(&self, x: &Class) -> Result<()> {
        self.check(x.degree)?;
        let n = self.chart.dim(x.degree);
        if x.coords.len() != n {
            return Err(Error::Usage(format!("class at {} has {} coordinates, group has dimension {n}", x.degree, x.coords.len())));
        }
        Ok(())
    }

    fn layout(&self, f: i32, d: Deg) -> Arc<Layout> {
        if let Some(l) = self.layouts.lock().unwrap().get(&(f, d)) {
            return l.clone();
        }
        let l = Arc::new(self.res.layout(f, d));
        self.layouts.lock().unwrap().insert((f, d), l.clone());
        l
    }

    /// Image of `d_n` on all of `P_n(d)`, tagged by domain coordinates.
    fn lift_space(&self, n: i32, d: Deg) -> Arc<Subspace> {
        if let Some(s) = self.lifts.lock().unwrap().get(&(n, d)) {
            return s.clone();
        }
        let src = self.layout(n, d);
        let dst = self.layout(n - 1, d);
        let s = Arc::new(image_and_kernel(dst.len, &self.res.images(n, &src, &dst)).0);
        self.lifts.lock().unwrap().insert((n, d), s.clone());
        s
    }

    /// Solves `d_n x = rhs` in degree `d`.
    fn lift(&self, n: i32, d: Deg, rhs: &BitVec) -> Option<BitVec> {
        if rhs.is_zero() {
            return Some(BitVec::zeros(self.layout(n, d).len));
        }
        self.lift_space(n, d).express(rhs)
    }

    pub fn chain_map(&self, c: &Class) -> Result<Arc<ChainMap>> {
        self.check_class(c)?;
        let key = (c.degree, c.coords.clone());
        if let Some(m) = self.maps.lock().unwrap().get(&key) {
            return Ok(m.clone());
        }
        let (f, deg) = split(c.degree);
        let m = Arc::new(ChainMap { f, deg, coords: c.coords.clone(), values: Mutex::default() });
        self.maps.lock().unwrap().insert(key, m.clone());
        Ok(m)
    }

    /// `C_n(g)` for `g` in `P_{f_c+n}`, over the layout of `P_n(deg g - deg c)`.
    pub fn chain_value(&self, m: &ChainMap, n: i32, g: usize) -> Result<Arc<BitVec>> {
        if let Some(v) = m.values.lock().unwrap().get(&(n, g)) {
            return Ok(v.clone());
        }
        let gen = &self.res.generators(m.f + n)[g];
        let d = sub(gen.deg(), m.deg);
        let target = self.layout(n, d);
        let v = if d.0 < 0 || target.len == 0 {
            BitVec::zeros(target.len)
        } else if n == 0 {
            let mut v = BitVec::zeros(target.len);
            if d == (0, 0) {
                let group = self.res.generators_in(m.f, m.deg);
                let i = group.iter().position(|&x| x == g).expect("generator in its own degree");
                if m.coords.get(i) {
                    v.flip(0);
                }
            }
            v
        } else {
            self.check(Resolution::ext_degree(n, d))?;
            let below = self.layout(n - 1, d);
            let mut rhs = BitVec::zeros(below.len);
            for (gp, a) in &gen.d {
                let gpd = self.res.generators(m.f + n - 1)[*gp].deg();
                let x = self.chain_value(m, n - 1, *gp)?;
                if x.is_zero() {
                    continue;
                }
                let xl = self.layout(n - 1, sub(gpd, m.deg));
                rhs.xor_assign(&self.res.act_element(sub(gen.deg(), gpd), a, &x, &xl, &below));
            }
            self.lift(n, d, &rhs).ok_or_else(|| Error::Consistency(format!("chain map does not lift at P_{n} in degree {d:?}")))?
        };
        let v = Arc::new(v);
        m.values.lock().unwrap().insert((n, g), v.clone());
        Ok(v)
    }

    /// `M_n(y)` for `y` in `P_{f_m+n}` of degree `yd`, extended linearly.
    fn apply_chain(&self, m: &ChainMap, n: i32, y: &BitVec, yd: Deg) -> Result<BitVec> {
        let yl = self.layout(m.f + n, yd);
        let target = self.layout(n, sub(yd, m.deg));
        let mut out = BitVec::zeros(target.len);
        for k in y.iter_ones() {
            let (g, ad, ai) = yl.locate(k);
            let v = self.chain_value(m, n, g)?;
            if v.is_zero() {
                continue;
            }
            let gd = self.res.generators(m.f + n)[g].deg();
            let vl = self.layout(n, sub(gd, m.deg));
            out.xor_assign(&self.res.act((ad, ai), &v, &vl, &target));
        }
        Ok(out)
    }

    /// Coefficients of `unit · g_i` for the generators of a group.
    fn evaluate(&self, x: &Class, v: &BitVec, layout: &Layout) -> bool {
        let (f, d) = split(x.degree);
        let group = self.res.generators_in(f, d);
        x.coords.iter_ones().fold(false, |acc, i| acc ^ layout.offset(group[i]).is_some_and(|o| v.get(o)))
    }

    fn homotopy(&self, b: &Class, c: &Class) -> Result<Arc<Homotopy>> {
        let key = [(b.degree, b.coords.clone()), (c.degree, c.coords.clone())];
        if let Some(h) = self.homotopies.lock().unwrap().get(&key) {
            return Ok(h.clone());
        }
        let h = Arc::new(Homotopy { b: self.chain_map(b)?, c: self.chain_map(c)?, values: Mutex::default() });
        self.homotopies.lock().unwrap().insert(key, h.clone());
        Ok(h)
    }

    /// `H_n(g)` for `g` in `P_{f_b+f_c+n}`, over `P_{n+1}(deg g - deg b - deg c)`.
    fn homotopy_value(&self, h: &Homotopy, n: i32, g: usize) -> Result<Arc<BitVec>> {
        if let Some(v) = h.values.lock().unwrap().get(&(n, g)) {
            return Ok(v.clone());
        }
        let m = h.b.f + h.c.f;
        let gen = &self.res.generators(m + n)[g];
        let shift = (h.b.deg.0 + h.c.deg.0, h.b.deg.1 + h.c.deg.1);
        let d = sub(gen.deg(), shift);
        let target = self.layout(n + 1, d);
        let v = if d.0 < 0 || target.len == 0 {
            BitVec::zeros(target.len)
        } else {
            self.check(Resolution::ext_degree(n + 1, d))?;
            let cg = self.chain_value(&h.c, h.b.f + n, g)?;
            let mut rhs = self.apply_chain(&h.b, n, &cg, sub(gen.deg(), h.c.deg))?;
            if n > 0 {
                let below = self.layout(n, d);
                for (gp, a) in &gen.d {
                    let gpd = self.res.generators(m + n - 1)[*gp].deg();
                    let x = self.homotopy_value(h, n - 1, *gp)?;
                    if x.is_zero() {
                        continue;
                    }
                    let xl = self.layout(n, sub(gpd, shift));
                    rhs.xor_assign(&self.res.act_element(sub(gen.deg(), gpd), a, &x, &xl, &below));
                }
            }
            match self.lift(n + 1, d, &rhs) {
                Some(v) => v,
                None if n == 0 => return Err(Error::Undefined("Massey product needs yz = 0".into())),
                None => return Err(Error::Consistency(format!("homotopy does not lift at P_{} in degree {d:?}", n + 1))),
            }
        };
        let v = Arc::new(v);
        h.values.lock().unwrap().insert((n, g), v.clone());
        Ok(v)
    }

    /// The products `x·y` from one chain map, for a batch of left factors.
    pub fn products_with(&self, xs: &[Class], c: &Class) -> Result<Vec<Class>> {
        let m = self.chain_map(c)?;
        xs.iter()
            .map(|x| {
                self.check_class(x)?;
                let deg = x.degree + c.degree;
                self.check(deg)?;
                let (f, d) = split(deg);
                let group = self.res.generators_in(f, d);
                let layout = self.layout(x.degree.f, split(x.degree).1);
                let mut out = BitVec::zeros(group.len());
                for (k, &g) in group.iter().enumerate() {
                    let v = self.chain_value(&m, x.degree.f, g)?;
                    if self.evaluate(x, &v, &layout) {
                        out.flip(k);
                    }
                }
                Ok(Class { degree: deg, coords: out })
            })
            .collect()
    }
}

impl ExtEngine for ResolutionExt {
    fn chart(&self) -> &ExtChart {
        &self.chart
    }

    fn dim(&self, d: TriDegree) -> Result<usize> {
        self.check(d)?;
        Ok(self.chart.dim(d))
    }

    fn product(&self, x: &Class, y: &Class) -> Result<Class> {
        Ok(self.products_with(std::slice::from_ref(x), y)?.remove(0))
    }

    fn massey(&self, a: &Class, b: &Class, c: &Class) -> Result<MasseyCoset> {
        for x in [a, b, c] {
            self.check_class(x)?;
        }
        let deg = a.degree + b.degree + c.degree + TriDegree::new(1, -1, 0);
        self.check(deg)?;
        let h = self.homotopy(b, c)?;
        let (f, d) = split(deg);
        let group = self.res.generators_in(f, d);
        let n = a.degree.f - 1;
        let mut value = BitVec::zeros(group.len());
        if n >= 0 {
            let layout = self.layout(a.degree.f, split(a.degree).1);
            for (k, &g) in group.iter().enumerate() {
                let v = self.homotopy_value(&h, n, g)?;
                if self.evaluate(a, &v, &layout) {
                    value.flip(k);
                }
            }
        }
        let ind = self.massey_indeterminacy(a, b, c)?;
        Ok(MasseyCoset::new(deg, value, &ind))
    }
}
