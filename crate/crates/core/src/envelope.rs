//! Truncated universal envelope of a graded Poisson pseudoalgebra over a
//! finite group kernel.
//!
//! The envelope is generated by two letters per base generator `e_i`: a
//! product letter `M_i` of degree `|e_i|` and a bracket letter `H_i` of
//! degree `|e_i| + p`, where `p` is the bracket shift.  A straightened word
//! of length `l >= 1` is a raw coordinate `(delta; tau; w)`: a free leading
//! kernel monomial `delta`, a tuple `tau` of `l - 1` kernel monomials
//! recording the component chosen at each product junction, and the letter
//! string `w`.  Layer `0` is the free rank-one module on the empty word.
//! The pseudoproduct concatenates words and runs over the junction
//! component: the component of `(d;t;u) * (d';s;v)` at outer monomial `om`
//! is the coordinate `(d'; t.th, th, s; uv)` with `th = d^-1 om d'`.
//! Products with the empty word average over the group; this is the unique
//! h-bilinear extension compatible with straightening, and it makes the
//! empty word a formal integral rather than a two-sided unit.  Over the
//! trivial group the average collapses to a single term and the empty word
//! is the classical unit.
//!
//! Relations are imposed as a linear subspace, never as a rewriting system:
//! straightening rows tie the kernel action on letters to the lead and
//! tuple coordinates, and five seeded families tie two-letter words to the
//! base product, bracket, and unit.  The span collects the seeds, all their
//! group translates, and their letter products on either side, subject to
//! the word bound; a product is kept only when every component stays within
//! the bound.  The quotient by the span carries the kernel action, the
//! inherited grading, and the letterwise differential with Koszul signs.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::dg::GradedPseudoStructure;
use crate::error::{Error, Result};
use crate::hopf::{HopfElement, Kernel, Mono};
use crate::linalg::{Mat, SparseRref, SparseVec};
use crate::module::{Grading, HMap, MElt, Module};
use crate::polytensor::PolyTensor;
use crate::report::{LawRecord, LawRun, Report};
use crate::scalar::{sign_pow, Rat};
use crate::structure::{record_conventions, run_suite, PseudoStructure, SuiteOptions};

/// Input data for the truncated envelope: a graded base and a word bound.
#[derive(Debug, Clone)]
pub struct EnvelopePresentation {
    pub base: GradedPseudoStructure,
    /// Maximum word length kept in the model; products that would exceed it
    /// are refused as outside truncation.
    pub word_bound: usize,
}

impl EnvelopePresentation {
    pub fn new(base: GradedPseudoStructure) -> Self {
        EnvelopePresentation { base, word_bound: 3 }
    }
}

/// Where a generator triple lands: an ordinary structure or an envelope.
#[derive(Clone)]
pub enum PTarget<'a> {
    Structure(&'a GradedPseudoStructure),
    Envelope(&'a Envelope),
}

/// A candidate generator triple `(B, f, g)`: `f` plays the product letters,
/// `g` the bracket letters, both given on the base generators.
#[derive(Clone)]
pub struct PTriple<'a> {
    pub target: PTarget<'a>,
    pub f: HMap,
    pub g: HMap,
}

fn sv_add(v: &mut SparseVec, idx: usize, c: &Rat) {
    if c.is_zero() {
        return;
    }
    let e = v.entry(idx).or_insert_with(Rat::zero);
    *e = &*e + c;
    if e.is_zero() {
        v.remove(&idx);
    }
}

fn sv_single(idx: usize) -> SparseVec {
    let mut v = SparseVec::new();
    v.insert(idx, Rat::one());
    v
}

/// One raw coordinate, decoded.
#[derive(Debug, Clone)]
struct Coord {
    layer: usize,
    di: usize,
    tau: Vec<usize>,
    word: Vec<usize>,
}

/// Indexing and arithmetic of the raw word space.  Layers are laid out in
/// descending length so that elimination pivots prefer long words and the
/// surviving classes are as short as possible.
#[derive(Debug, Clone)]
struct Words {
    group: Vec<Mono>,
    mul: Vec<Vec<usize>>,
    inv: Vec<usize>,
    /// Group indices of the kernel generators.
    gen_g: Vec<usize>,
    uidx: usize,
    m: usize,
    nbase: usize,
    nlet: usize,
    bound: usize,
    layer_dim: Vec<usize>,
    layer_offset: Vec<usize>,
    raw_dim: usize,
    letter_deg: Vec<i64>,
    /// `act[g][x]` expands the action of group element `g` on letter `x`
    /// over letters of the same kind.
    act: Vec<Vec<Vec<(usize, Rat)>>>,
    coords: Vec<Coord>,
}

impl Words {
    fn build(base: &GradedPseudoStructure, bound: usize) -> Words {
        let kernel = &base.module.kernel;
        let group = kernel.basis(0);
        let m = group.len();
        let gidx: BTreeMap<Mono, usize> =
            group.iter().enumerate().map(|(i, g)| (g.clone(), i)).collect();
        let mul: Vec<Vec<usize>> = (0..m)
            .map(|a| (0..m).map(|b| gidx[&kernel.mono_mul(&group[a], &group[b])]).collect())
            .collect();
        let inv: Vec<usize> =
            (0..m).map(|a| gidx[&kernel.mono_antipode(&group[a]).0]).collect();
        let gen_g: Vec<usize> =
            (0..kernel.gen_count()).map(|q| gidx[&kernel.gen_mono(q)]).collect();
        let uidx = gidx[&kernel.unit_mono()];
        let nbase = base.module.gens();
        let nlet = 2 * nbase;
        let grading = base.grading_or_trivial();
        let p = grading.p;
        let letter_deg: Vec<i64> = (0..nlet)
            .map(|x| grading.degrees[x % nbase] + if x >= nbase { p } else { 0 })
            .collect();
        let act: Vec<Vec<Vec<(usize, Rat)>>> = (0..m)
            .map(|g| {
                let mat = base.module.mono_matrix(&group[g]);
                (0..nlet)
                    .map(|x| {
                        let (kind, i) = (x / nbase, x % nbase);
                        (0..nbase)
                            .filter(|&k| !mat[(k, i)].is_zero())
                            .map(|k| (kind * nbase + k, mat[(k, i)].clone()))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let layer_dim: Vec<usize> = (0..=bound)
            .map(|l| if l == 0 { m } else { m * m.pow(l as u32 - 1) * nlet.pow(l as u32) })
            .collect();
        let mut layer_offset = vec![0; bound + 1];
        let mut off = 0;
        for l in (0..=bound).rev() {
            layer_offset[l] = off;
            off += layer_dim[l];
        }
        let raw_dim = off;
        let mut coords = Vec::with_capacity(raw_dim);
        for l in (0..=bound).rev() {
            for r0 in 0..layer_dim[l] {
                let mut r = r0;
                let mut word = vec![0; l];
                for t in (0..l).rev() {
                    word[t] = r % nlet;
                    r /= nlet;
                }
                let tl = l.saturating_sub(1);
                let mut tau = vec![0; tl];
                for t in (0..tl).rev() {
                    tau[t] = r % m;
                    r /= m;
                }
                coords.push(Coord { layer: l, di: r, tau, word });
            }
        }
        Words {
            group,
            mul,
            inv,
            gen_g,
            uidx,
            m,
            nbase,
            nlet,
            bound,
            layer_dim,
            layer_offset,
            raw_dim,
            letter_deg,
            act,
            coords,
        }
    }

    fn enc(&self, layer: usize, di: usize, tau: &[usize], word: &[usize]) -> usize {
        debug_assert_eq!(tau.len(), layer.saturating_sub(1));
        debug_assert_eq!(word.len(), layer);
        let mut idx = di;
        for &t in tau {
            idx = idx * self.m + t;
        }
        for &x in word {
            idx = idx * self.nlet + x;
        }
        self.layer_offset[layer] + idx
    }

    fn letter_index(&self, x: usize) -> usize {
        self.enc(1, self.uidx, &[], &[x])
    }

    fn translate_idx(&self, idx: usize, g: usize) -> usize {
        let c = &self.coords[idx];
        self.enc(c.layer, self.mul[g][c.di], &c.tau, &c.word)
    }

    fn translate_row(&self, row: &SparseVec, g: usize) -> SparseVec {
        row.iter().map(|(&i, c)| (self.translate_idx(i, g), c.clone())).collect()
    }

    fn row_lmax(&self, row: &SparseVec) -> usize {
        // Ascending indices start at the longest layer, so the first key
        // determines the maximal word length present.
        let (&first, _) = row.iter().next().expect("empty row has no layer");
        self.coords[first].layer
    }

    fn idx_degree(&self, idx: usize) -> i64 {
        self.coords[idx].word.iter().map(|&x| self.letter_deg[x]).sum()
    }

    fn letter_name(&self, x: usize) -> String {
        if x < self.nbase {
            format!("M{}", x + 1)
        } else {
            format!("H{}", x - self.nbase + 1)
        }
    }

    fn fmt_idx(&self, kernel: &Kernel, idx: usize) -> String {
        let c = &self.coords[idx];
        let lead = kernel.fmt_mono(&self.group[c.di]);
        if c.layer == 0 {
            return format!("({lead}; [])");
        }
        let tau = c
            .tau
            .iter()
            .map(|&t| kernel.fmt_mono(&self.group[t]))
            .collect::<Vec<_>>()
            .join(",");
        let word =
            c.word.iter().map(|&x| self.letter_name(x)).collect::<Vec<_>>().join(" ");
        format!("({lead}; [{tau}]; {word})")
    }

    /// Adds `coef` times the components of the pseudoproduct of two raw
    /// coordinates into the per-component accumulators.
    fn mu_into(&self, c1: usize, c2: usize, coef: &Rat, out: &mut [SparseVec]) -> Result<()> {
        let a = &self.coords[c1];
        let b = &self.coords[c2];
        match (a.layer, b.layer) {
            (0, 0) => {
                // Empty by empty: the integral spreads one coordinate over
                // every component; the left lead is absorbed.
                let idx = self.enc(0, b.di, &[], &[]);
                for slot in out.iter_mut() {
                    sv_add(slot, idx, coef);
                }
            }
            (0, _) => {
                for slot in out.iter_mut() {
                    sv_add(slot, c2, coef);
                }
            }
            (_, 0) => {
                for om in 0..self.m {
                    let d = self.mul[self.inv[om]][a.di];
                    sv_add(&mut out[om], self.enc(a.layer, d, &a.tau, &a.word), coef);
                }
            }
            (la, lb) => {
                let l = la + lb;
                if l > self.bound {
                    return Err(Error::OutOfRange(format!(
                        "length-{la} by length-{lb} product lands outside truncation at word bound {}",
                        self.bound
                    )));
                }
                let mut word = Vec::with_capacity(l);
                word.extend_from_slice(&a.word);
                word.extend_from_slice(&b.word);
                let mut tau = Vec::with_capacity(l - 1);
                for om in 0..self.m {
                    let theta = self.mul[self.mul[self.inv[a.di]][om]][b.di];
                    tau.clear();
                    for &t in &a.tau {
                        tau.push(self.mul[t][theta]);
                    }
                    tau.push(theta);
                    tau.extend_from_slice(&b.tau);
                    sv_add(&mut out[om], self.enc(l, b.di, &tau, &word), coef);
                }
            }
        }
        Ok(())
    }

    /// Straightening rows: the kernel action on any single letter can be
    /// traded for a tuple or lead adjustment.  Quantified over all raw
    /// coordinates and all kernel generators; composite group elements
    /// follow by chaining.
    fn rel_rows(&self) -> Vec<SparseVec> {
        let mut rows = Vec::new();
        for &gi in &self.gen_g {
            for l in 1..=self.bound {
                for r0 in 0..self.layer_dim[l] {
                    let idx = self.layer_offset[l] + r0;
                    let c = self.coords[idx].clone();
                    for t in 0..l {
                        let mut row = SparseVec::new();
                        for (k, coef) in &self.act[gi][c.word[t]] {
                            let mut w2 = c.word.clone();
                            w2[t] = *k;
                            sv_add(&mut row, self.enc(l, c.di, &c.tau, &w2), coef);
                        }
                        let neg = -Rat::one();
                        if t + 1 < l {
                            let mut t2 = c.tau.clone();
                            t2[t] = self.mul[c.tau[t]][self.inv[gi]];
                            sv_add(&mut row, self.enc(l, c.di, &t2, &c.word), &neg);
                        } else {
                            let d2 = self.mul[c.di][gi];
                            let t2: Vec<usize> =
                                c.tau.iter().map(|&x| self.mul[x][gi]).collect();
                            sv_add(&mut row, self.enc(l, d2, &t2, &c.word), &neg);
                        }
                        if !row.is_empty() {
                            rows.push(row);
                        }
                    }
                }
            }
        }
        rows
    }

    /// Letterwise differential with Koszul signs, kind preserved.
    fn raw_d_row(&self, dmat: &Mat, row: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (&idx, coef) in row {
            let c = &self.coords[idx];
            let mut sign = Rat::one();
            for t in 0..c.layer {
                let x = c.word[t];
                let (kind, i) = (x / self.nbase, x % self.nbase);
                for k in 0..self.nbase {
                    let dc = &dmat[(k, i)];
                    if !dc.is_zero() {
                        let mut w2 = c.word.clone();
                        w2[t] = kind * self.nbase + k;
                        let v = coef * &sign * dc;
                        sv_add(&mut out, self.enc(c.layer, c.di, &c.tau, &w2), &v);
                    }
                }
                if self.letter_deg[x] % 2 != 0 {
                    sign = -sign;
                }
            }
        }
        out
    }
}

/// One seeded relation row with its family tag and instance label.
struct Seed {
    family: &'static str,
    instance: String,
    row: SparseVec,
}

/// The five relation families on two-letter words, one row per component.
/// Families are seeded only for the structure the base actually carries.
fn family_rows(
    base: &GradedPseudoStructure,
    w: &Words,
    unit: Option<&[Rat]>,
) -> Result<Vec<Seed>> {
    let kernel = &base.module.kernel;
    let n = w.nbase;
    let p = base.shift();
    let mut out = Vec::new();
    let embed_letters = |row: &mut SparseVec, coords: &[Rat], kind: usize, sign: &Rat| {
        for (k, c) in coords.iter().enumerate() {
            let v = sign * c;
            sv_add(row, w.enc(1, w.uidx, &[], &[kind * n + k]), &v);
        }
    };
    if w.bound >= 2 {
        for i in 0..n {
            for j in 0..n {
                let gi = base.module.gen_elt(i);
                let gj = base.module.gen_elt(j);
                let (di, dj) = (base.degree(i), base.degree(j));
                let brk = match &base.bracket {
                    Some(_) => Some(base.bracket_eval(&gi, &gj)?),
                    None => None,
                };
                for om in 0..w.m {
                    let label = format!(
                        "(e{}, e{}; {})",
                        i + 1,
                        j + 1,
                        kernel.fmt_mono(&w.group[om])
                    );
                    if base.product.is_some() {
                        // The table is the diagonal core of the
                        // pseudoproduct: its component at om multiplies
                        // the first argument by the inverse monomial.
                        let xi = base.module.act_mono(&w.group[w.inv[om]], &gi);
                        let c = base.product_eval(&xi, &gj)?;
                        let neg = -Rat::one();
                        let mut row = sv_single(w.enc(2, w.uidx, &[om], &[i, j]));
                        embed_letters(&mut row, base.module.fin_coords(&c), 0, &neg);
                        out.push(Seed { family: "M-product", instance: label.clone(), row });

                        let mut row = sv_single(w.enc(2, w.uidx, &[om], &[i, n + j]));
                        sv_add(
                            &mut row,
                            w.enc(2, w.uidx, &[om], &[j, n + i]),
                            &sign_pow(di * dj),
                        );
                        embed_letters(&mut row, base.module.fin_coords(&c), 1, &neg);
                        out.push(Seed { family: "H-product", instance: label.clone(), row });
                    }
                    if let Some(b) = &brk {
                        let swap = -sign_pow((di + p) * (dj + p));
                        let mut row = sv_single(w.enc(2, w.uidx, &[om], &[n + i, n + j]));
                        sv_add(
                            &mut row,
                            w.enc(2, w.inv[om], &[w.inv[om]], &[n + j, n + i]),
                            &swap,
                        );
                        add_bracket_terms(w, base, b, om, 1, &mut row, &embed_letters);
                        out.push(Seed { family: "H-bracket", instance: label.clone(), row });

                        let swap = -sign_pow((di + p) * dj);
                        let mut row = sv_single(w.enc(2, w.uidx, &[om], &[n + i, j]));
                        sv_add(
                            &mut row,
                            w.enc(2, w.inv[om], &[w.inv[om]], &[j, n + i]),
                            &swap,
                        );
                        add_bracket_terms(w, base, b, om, 0, &mut row, &embed_letters);
                        out.push(Seed { family: "M-bracket", instance: label, row });
                    }
                }
            }
        }
    }
    if let Some(u) = unit {
        // The product letter of the unit is the empty word.  A two-sided
        // unit is fixed by the kernel action, so this single row and its
        // translates identify every empty-word component consistently.
        let mut row = SparseVec::new();
        embed_letters(&mut row, u, 0, &Rat::one());
        let neg = -Rat::one();
        sv_add(&mut row, w.enc(0, w.uidx, &[], &[]), &neg);
        out.push(Seed { family: "M-unit", instance: "(unit)".into(), row });
    }
    Ok(out)
}

fn add_bracket_terms(
    w: &Words,
    base: &GradedPseudoStructure,
    b: &PolyTensor,
    om: usize,
    kind: usize,
    row: &mut SparseVec,
    embed_letters: &impl Fn(&mut SparseVec, &[Rat], usize, &Rat),
) {
    for (tuple, melt) in b.terms() {
        if tuple[0] == w.group[om] {
            let neg = -Rat::one();
            embed_letters(row, base.module.fin_coords(melt), kind, &neg);
        }
    }
}

/// Nested spans indexed by maximal word length: band `k` holds the rows of
/// length at most `k`.  A candidate is pruned only when it already lies in
/// the span of rows no longer than itself, whose products the closure
/// generates anyway.
struct BandedSpan {
    bands: Vec<SparseRref>,
}

impl BandedSpan {
    fn new(bound: usize) -> Self {
        BandedSpan { bands: (0..=bound).map(|_| SparseRref::new()).collect() }
    }

    fn insert(&mut self, lmax: usize, row: &SparseVec) -> bool {
        let mut fresh = false;
        for k in lmax..self.bands.len() {
            let grew = self.bands[k].insert(row);
            if k == lmax {
                fresh = grew;
            }
        }
        fresh
    }

    fn into_total(mut self) -> SparseRref {
        self.bands.pop().expect("at least one band")
    }
}

/// Closes the seeded rows under group translates and letter products on
/// either side, subject to the word bound.  Straightening rows join every
/// band directly: their letter products stay inside the straightening span.
fn close_span(w: &Words, seeds: &[Seed]) -> SparseRref {
    let mut banded = BandedSpan::new(w.bound);
    for row in w.rel_rows() {
        let lm = w.row_lmax(&row);
        banded.insert(lm, &row);
    }
    let mut frontier: Vec<(usize, SparseVec)> = Vec::new();
    for seed in seeds {
        if seed.row.is_empty() {
            continue;
        }
        for g in 0..w.m {
            let row = w.translate_row(&seed.row, g);
            let lm = w.row_lmax(&row);
            if banded.insert(lm, &row) {
                frontier.push((lm, row));
            }
        }
    }
    while let Some((lm, row)) = frontier.pop() {
        if lm >= w.bound {
            // Any letter product would push the longest part past the bound.
            continue;
        }
        for x in 0..w.nlet {
            let li = w.letter_index(x);
            for side in 0..2 {
                let mut out = vec![SparseVec::new(); w.m];
                let mut fits = true;
                for (&cidx, coef) in &row {
                    let r = if side == 0 {
                        w.mu_into(li, cidx, coef, &mut out)
                    } else {
                        w.mu_into(cidx, li, coef, &mut out)
                    };
                    if r.is_err() {
                        fits = false;
                        break;
                    }
                }
                if !fits {
                    continue;
                }
                for orow in &out {
                    if orow.is_empty() {
                        continue;
                    }
                    for g in 0..w.m {
                        let t = w.translate_row(orow, g);
                        let lm2 = w.row_lmax(&t);
                        if banded.insert(lm2, &t) {
                            frontier.push((lm2, t));
                        }
                    }
                }
            }
        }
    }
    banded.into_total()
}

/// Two-sided unit of a finite-dimensional product, if one exists.
fn find_unit(s: &PseudoStructure) -> Result<Option<Vec<Rat>>> {
    if s.product.is_none() || s.module.is_free() {
        return Ok(None);
    }
    let n = s.module.gens();
    let mut a = Mat::zero(2 * n * n, n);
    let mut rhs = vec![Rat::zero(); 2 * n * n];
    for j in 0..n {
        let gj = s.module.gen_elt(j);
        for k in 0..n {
            let gk = s.module.gen_elt(k);
            let left = s.product_eval(&gk, &gj)?;
            let right = s.product_eval(&gj, &gk)?;
            for r in 0..n {
                a[(j * n + r, k)] = s.module.fin_coords(&left)[r].clone();
                a[(n * n + j * n + r, k)] = s.module.fin_coords(&right)[r].clone();
            }
        }
        rhs[j * n + j] = Rat::one();
        rhs[n * n + j * n + j] = Rat::one();
    }
    Ok(a.solve(&rhs))
}

/// Unit for envelope purposes: must be homogeneous of degree zero.
fn base_unit(base: &GradedPseudoStructure, grading: &Grading) -> Result<Option<Vec<Rat>>> {
    let Some(u) = find_unit(base.structure())? else {
        return Ok(None);
    };
    match grading.elt_degree(&base.module, &MElt::Fin(u.clone()))? {
        Some(0) | None => Ok(Some(u)),
        Some(d) => Err(Error::InvalidGrading(format!(
            "base unit has degree {d}; a unit must sit in degree 0"
        ))),
    }
}

/// The truncated envelope: quotient module, grading, differential, and the
/// two letter embeddings.
#[derive(Debug, Clone)]
pub struct Envelope {
    base: GradedPseudoStructure,
    words: Words,
    span: SparseRref,
    free: Vec<usize>,
    free_pos: BTreeMap<usize, usize>,
    module: Module,
    grading: Grading,
    diff: HMap,
    m_map: HMap,
    h_map: HMap,
    unit_coords: Option<Vec<Rat>>,
}

impl Envelope {
    pub fn module(&self) -> &Module {
        &self.module
    }

    pub fn dim(&self) -> usize {
        self.free.len()
    }

    pub fn word_bound(&self) -> usize {
        self.words.bound
    }

    pub fn base(&self) -> &GradedPseudoStructure {
        &self.base
    }

    pub fn grading(&self) -> &Grading {
        &self.grading
    }

    pub fn differential(&self) -> &HMap {
        &self.diff
    }

    /// Product-letter embedding of the base.
    pub fn m_map(&self) -> &HMap {
        &self.m_map
    }

    /// Bracket-letter embedding of the base.
    pub fn h_map(&self) -> &HMap {
        &self.h_map
    }

    /// Coordinates of the base unit, when the base product has one.
    pub fn unit_coords(&self) -> Option<&[Rat]> {
        self.unit_coords.as_deref()
    }

    /// Class of the empty word with trivial lead.
    pub fn empty_class(&self) -> MElt {
        self.class_of_raw(self.words.enc(0, self.words.uidx, &[], &[]))
    }

    /// The empty-word class doubles as the unit class when the base product
    /// has a unit; the unit relation identifies the two.
    pub fn unit_class(&self) -> Option<MElt> {
        self.unit_coords.as_ref().map(|_| self.empty_class())
    }

    /// Word length of the basis class `k`.
    pub fn basis_layer(&self, k: usize) -> usize {
        self.words.coords[self.free[k]].layer
    }

    pub fn class_label(&self, k: usize) -> String {
        self.words.fmt_idx(&self.base.module.kernel, self.free[k])
    }

    fn project(&self, row: &SparseVec) -> Vec<Rat> {
        let r = self.span.reduce(row);
        let mut v = vec![Rat::zero(); self.free.len()];
        for (i, c) in r {
            v[self.free_pos[&i]] = c;
        }
        v
    }

    fn class_of_raw(&self, idx: usize) -> MElt {
        MElt::Fin(self.project(&sv_single(idx)))
    }

    /// Pseudoproduct of two classes, reported per component as a 2-slot
    /// tensor.  Classes whose representing words would concatenate past the
    /// word bound are refused, never silently dropped.
    pub fn product(&self, a: &MElt, b: &MElt) -> Result<PolyTensor> {
        let w = &self.words;
        let ca = self.module.fin_coords(a);
        let cb = self.module.fin_coords(b);
        let mut out = vec![SparseVec::new(); w.m];
        for (i, x) in ca.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in cb.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let c = x * y;
                w.mu_into(self.free[i], self.free[j], &c, &mut out)?;
            }
        }
        let unit = self.base.module.kernel.unit_mono();
        let mut t = PolyTensor::zero(2);
        for (om, row) in out.iter().enumerate() {
            if row.is_empty() {
                continue;
            }
            let elt = MElt::Fin(self.project(row));
            t.add_term(&self.module, vec![w.group[om].clone(), unit.clone()], elt);
        }
        Ok(t)
    }

    /// The envelope as a plain graded structure (no product table; the
    /// pseudoproduct lives on [`Envelope::product`]).
    pub fn as_structure(&self) -> Result<GradedPseudoStructure> {
        let mut s =
            PseudoStructure::new(&format!("env({})", self.base.name), self.module.clone());
        s.differential = Some(self.diff.clone());
        s.grading = Some(self.grading.clone());
        GradedPseudoStructure::new(s)
    }
}

/// Builds the truncated envelope and a report certifying the imposed
/// relations, associativity, and h-bilinearity at class level.
pub fn build_envelope_truncated(p: &EnvelopePresentation) -> Result<(Envelope, Report)> {
    let base = &p.base;
    let kernel = base.module.kernel.clone();
    if kernel.group_order().is_none() {
        return Err(Error::Unsupported(
            "envelope over a polynomial kernel; the triple and relation-image checks cover that case".into(),
        ));
    }
    if base.module.is_free() {
        return Err(Error::Unsupported(
            "envelope over a free base presentation; finitize the module first".into(),
        ));
    }
    if p.word_bound == 0 {
        return Err(Error::Unsupported(
            "envelope with word bound 0; the bound must be at least 1".into(),
        ));
    }
    let suite = run_suite(base.structure(), SuiteOptions { expect_commutative: true })?;
    if let Some(bad) = suite.iter().find(|r| !r.passed()) {
        let at = bad
            .witnesses
            .first()
            .map(|w| format!(" at {}", w.instance))
            .unwrap_or_default();
        return Err(Error::InvalidTable(format!(
            "suite failure on base '{}': {} fails{at}",
            base.name, bad.law
        )));
    }
    let grading = base.grading_or_trivial();
    grading.validate_action(&base.module)?;

    let words = Words::build(base, p.word_bound);
    let unit = base_unit(base, &grading)?;
    let seeds = family_rows(base, &words, unit.as_deref())?;
    let span = close_span(&words, &seeds);

    // A quotient grading needs every eliminated row to be homogeneous.
    for (piv, row) in span.rows() {
        let mut deg: Option<i64> = None;
        for &i in row.keys().chain(std::iter::once(piv)) {
            let d = words.idx_degree(i);
            match deg {
                None => deg = Some(d),
                Some(prev) if prev != d => {
                    return Err(Error::InvalidGrading(format!(
                        "relation span mixes degrees {prev} and {d} in the row eliminating {}",
                        words.fmt_idx(&kernel, *piv)
                    )))
                }
                _ => {}
            }
        }
    }

    let free = span.free_indices(words.raw_dim);
    let free_pos: BTreeMap<usize, usize> =
        free.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    let dim = free.len();
    let project = |row: &SparseVec| -> Vec<Rat> {
        let r = span.reduce(row);
        let mut v = vec![Rat::zero(); dim];
        for (i, c) in r {
            v[free_pos[&i]] = c;
        }
        v
    };

    let mut mats = Vec::new();
    for &gi in &words.gen_g {
        let mut mat = Mat::zero(dim, dim);
        for (c, &cls) in free.iter().enumerate() {
            let col = project(&sv_single(words.translate_idx(cls, gi)));
            for (r, v) in col.into_iter().enumerate() {
                mat[(r, c)] = v;
            }
        }
        mats.push(mat);
    }
    let module = Module::finite(&kernel, mats)?;
    let qgrading =
        Grading { degrees: free.iter().map(|&i| words.idx_degree(i)).collect(), p: grading.p };
    qgrading.validate_action(&module)?;

    let m_map = HMap {
        columns: (0..words.nbase)
            .map(|i| MElt::Fin(project(&sv_single(words.letter_index(i)))))
            .collect(),
    };
    let h_map = HMap {
        columns: (0..words.nbase)
            .map(|i| MElt::Fin(project(&sv_single(words.letter_index(words.nbase + i)))))
            .collect(),
    };
    let dmat = base
        .differential
        .as_ref()
        .expect("graded base carries a differential")
        .matrix(&base.module);
    let diff = HMap {
        columns: free
            .iter()
            .map(|&cls| MElt::Fin(project(&words.raw_d_row(&dmat, &sv_single(cls)))))
            .collect(),
    };
    let dd = diff.compose(&module, &module, &diff);
    if dd.columns.iter().any(|c| !module.elt_is_zero(c)) {
        return Err(Error::Model(
            "word differential fails to square to zero; the relation span is not d-stable".into(),
        ));
    }

    let env = Envelope {
        base: base.clone(),
        words,
        span,
        free,
        free_pos,
        module,
        grading: qgrading,
        diff,
        m_map,
        h_map,
        unit_coords: unit,
    };

    let mut report = Report::new("envelope");
    record_conventions(&mut report, base.structure());
    report.convention(
        "word-space",
        "classes are straightened words (lead; tuple; letters) with a free leading kernel monomial; elimination prefers long words, so surviving classes are short",
    );
    report.convention(
        "empty-word",
        "products with the empty word average over the group; over a nontrivial group the empty word is a formal integral, not a unit",
    );
    report.convention(
        "truncation",
        "relation rows are multiplied by letters only while every component stays within the word bound; longer products are refused as outside truncation",
    );
    {
        let sec = report.section("base-suite");
        sec.notes.push(format!("base '{}' passes the structure suite", env.base.name));
        sec.records = suite;
    }
    {
        let layers: Vec<usize> = (0..=env.words.bound)
            .map(|l| (0..env.dim()).filter(|&k| env.basis_layer(k) == l).count())
            .collect();
        let sec = report.section("word-space");
        sec.notes.push(format!(
            "raw dimension {} over {} layers; relation span rank {}; quotient dimension {}",
            env.words.raw_dim,
            env.words.bound + 1,
            env.span.rank(),
            env.dim()
        ));
        sec.notes.push(format!("classes by word length: {layers:?}"));
        sec.notes.push(match &env.unit_coords {
            Some(_) => "base unit present; the unit relation ties it to the empty word".into(),
            None => "base has no two-sided unit; the unit relation is vacuous".into(),
        });
    }
    class_law_records(&env, &mut report)?;
    Ok((env, report))
}

/// Class-level certification: the relation families, associativity, and
/// h-bilinearity evaluated through quotient products.
fn class_law_records(env: &Envelope, report: &mut Report) -> Result<()> {
    let t = PTriple {
        target: PTarget::Envelope(env),
        f: env.m_map.clone(),
        g: env.h_map.clone(),
    };
    let mut records = condition_records(&env.base, &t)?;
    records.push(unit_law(&env.base, &t)?.0);
    records.push(assoc_record(env)?);
    records.push(hbilin_record(env)?);
    let sec = report.section("classes");
    sec.notes
        .push("letter classes replayed through the quotient product".into());
    sec.records.extend(records);
    Ok(())
}

/// Associativity of the quotient product over letter and empty classes.
fn assoc_record(env: &Envelope) -> Result<LawRecord> {
    let mut run = LawRun::new("associativity", "word classes");
    let classes = letter_classes(env);
    let qm = &env.module;
    let w = &env.words;
    for (na, a) in &classes {
        for (nb, b) in &classes {
            for (nc, c) in &classes {
                let outcome = (|| -> Result<Option<String>> {
                    // Left and right nestings, spread to three components.
                    let mut left: BTreeMap<(usize, usize), MElt> = BTreeMap::new();
                    for (tuple, mab) in env.product(a, b)?.terms() {
                        let o1 = group_index(w, &tuple[0]);
                        for (tuple2, m2) in env.product(mab, c)?.terms() {
                            let o2 = group_index(w, &tuple2[0]);
                            acc(qm, &mut left, (w.mul[o1][o2], o2), m2);
                        }
                    }
                    let mut right: BTreeMap<(usize, usize), MElt> = BTreeMap::new();
                    for (tuple, mbc) in env.product(b, c)?.terms() {
                        let o2 = group_index(w, &tuple[0]);
                        for (tuple2, m2) in env.product(a, mbc)?.terms() {
                            let o1 = group_index(w, &tuple2[0]);
                            acc(qm, &mut right, (o1, o2), m2);
                        }
                    }
                    for (k, v) in &right {
                        let lhs = left.remove(k).unwrap_or_else(|| qm.zero_elt());
                        if !qm.elt_is_zero(&qm.elt_sub(&lhs, v)) {
                            return Ok(Some(format!(
                                "components differ at ({}, {})",
                                env.base.module.kernel.fmt_mono(&w.group[k.0]),
                                env.base.module.kernel.fmt_mono(&w.group[k.1])
                            )));
                        }
                    }
                    for (k, v) in left {
                        if !qm.elt_is_zero(&v) {
                            return Ok(Some(format!(
                                "stray component at ({}, {})",
                                env.base.module.kernel.fmt_mono(&w.group[k.0]),
                                env.base.module.kernel.fmt_mono(&w.group[k.1])
                            )));
                        }
                    }
                    Ok(None)
                })();
                run.instance(|| format!("({na}, {nb}, {nc})"), outcome)?;
            }
        }
    }
    Ok(run.finish())
}

fn acc(qm: &Module, map: &mut BTreeMap<(usize, usize), MElt>, key: (usize, usize), v: &MElt) {
    let e = map.entry(key).or_insert_with(|| qm.zero_elt());
    *e = qm.elt_add(e, v);
}

fn group_index(w: &Words, m: &Mono) -> usize {
    w.group.iter().position(|g| g == m).expect("group monomial")
}

/// Kernel translates move through the quotient product as coefficient
/// twists on the matching slot.
fn hbilin_record(env: &Envelope) -> Result<LawRecord> {
    let mut run = LawRun::new("h-bilinearity", "word classes");
    let classes = letter_classes(env);
    let qm = &env.module;
    let kernel = &env.base.module.kernel;
    for q in 0..kernel.gen_count() {
        let g = kernel.gen_mono(q);
        let gh = HopfElement::from_mono(kernel, g.clone());
        let unit = HopfElement::unit(kernel);
        for (na, a) in &classes {
            for (nb, b) in &classes {
                let ga = qm.act_mono(&g, a);
                let gb = qm.act_mono(&g, b);
                let first = (|| -> Result<Option<String>> {
                    let lhs = env.product(&ga, b)?;
                    let rhs = env
                        .product(a, b)?
                        .scale_slots(qm, &[gh.clone(), unit.clone()])
                        .straighten(qm);
                    residue_detail(qm, &lhs.sub(qm, &rhs))
                })();
                run.instance(|| format!("(g {na}, {nb})"), first)?;
                let second = (|| -> Result<Option<String>> {
                    let lhs = env.product(a, &gb)?;
                    let rhs = env
                        .product(a, b)?
                        .scale_slots(qm, &[unit.clone(), gh.clone()])
                        .straighten(qm);
                    residue_detail(qm, &lhs.sub(qm, &rhs))
                })();
                run.instance(|| format!("({na}, g {nb})"), second)?;
            }
        }
    }
    Ok(run.finish())
}

fn residue_detail(module: &Module, t: &PolyTensor) -> Result<Option<String>> {
    let t = if module.is_free() { t.module_normalize(module) } else { t.clone() };
    if t.is_zero() {
        Ok(None)
    } else {
        Ok(Some(format!("residue {}", t.fmt(module))))
    }
}

fn letter_classes(env: &Envelope) -> Vec<(String, MElt)> {
    let mut out = vec![("empty".to_string(), env.empty_class())];
    for (i, c) in env.m_map.columns.iter().enumerate() {
        out.push((format!("M{}", i + 1), c.clone()));
    }
    for (i, c) in env.h_map.columns.iter().enumerate() {
        out.push((format!("H{}", i + 1), c.clone()));
    }
    out
}

/// The word differential and its certification: every relation row stays in
/// the span under the differential, the quotient square vanishes, and the
/// degree shift is one.
pub fn derive_differential(env: &Envelope) -> Result<(HMap, Report)> {
    let mut report = Report::new("differential");
    record_conventions(&mut report, env.base.structure());
    report.convention(
        "koszul",
        "the word differential acts letterwise with sign (-1)^(sum of earlier letter degrees), preserving letter kind",
    );
    let w = &env.words;
    let kernel = &env.base.module.kernel;
    let dmat = env
        .base
        .differential
        .as_ref()
        .expect("graded base carries a differential")
        .matrix(&env.base.module);

    let mut rel = LawRun::new("d-relations", "family seeds");
    let seeds = family_rows(&env.base, w, env.unit_coords.as_deref())?;
    for seed in &seeds {
        let image = w.raw_d_row(&dmat, &seed.row);
        let ok = env.span.reduce(&image).is_empty();
        rel.instance(
            || format!("{} {}", seed.family, seed.instance),
            if ok { Ok(None) } else { Ok(Some("image leaves the relation span".into())) },
        )?;
    }
    let mut span_run = LawRun::new("d-span", "eliminated rows");
    for (piv, row) in env.span.rows() {
        // Stored rows carry their pivot entry with coefficient one.
        let image = w.raw_d_row(&dmat, row);
        let ok = env.span.reduce(&image).is_empty();
        span_run.instance(
            || format!("row eliminating {}", w.fmt_idx(kernel, *piv)),
            if ok { Ok(None) } else { Ok(Some("image leaves the relation span".into())) },
        )?;
    }
    let mut square = LawRun::new("d-squared", "basis classes");
    for k in 0..env.dim() {
        let mut e = vec![Rat::zero(); env.dim()];
        e[k] = Rat::one();
        let once = env.diff.apply(&env.module, &env.module, &MElt::Fin(e));
        let twice = env.diff.apply(&env.module, &env.module, &once);
        square.instance(
            || env.class_label(k),
            if env.module.elt_is_zero(&twice) {
                Ok(None)
            } else {
                Ok(Some(format!("d^2 = {}", env.module.fmt_elt(&twice))))
            },
        )?;
    }
    let mut degree = LawRun::new("d-degree", "word differential");
    degree.instance(
        || "(shift)".into(),
        match env.diff.degree_shift(&env.module, &env.module, &env.grading, &env.grading) {
            Ok(None) | Ok(Some(1)) => Ok(None),
            Ok(Some(s)) => Ok(Some(format!("degree shift {s}, expected 1"))),
            Err(e) => Ok(Some(e.to_string())),
        },
    )?;
    let sec = report.section("differential");
    sec.notes.push(format!(
        "{} of {} basis classes have a nonzero image",
        env.diff.columns.iter().filter(|c| !env.module.elt_is_zero(c)).count(),
        env.dim()
    ));
    sec.records.push(rel.finish());
    sec.records.push(span_run.finish());
    sec.records.push(square.finish());
    sec.records.push(degree.finish());
    Ok((env.diff.clone(), report))
}

/// Shared evaluation context for triple conditions against either target.
struct TripleCtx<'a> {
    base: &'a GradedPseudoStructure,
    t: &'a PTriple<'a>,
}

enum PairCoef<'a> {
    R(&'a Rat),
    H(&'a HopfElement),
}

fn decompose(x: &MElt) -> Vec<(usize, PairCoef<'_>)> {
    match x {
        MElt::Fin(v) => v
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (i, PairCoef::R(c)))
            .collect(),
        MElt::Free(v) => v
            .iter()
            .enumerate()
            .filter(|(_, h)| !h.is_zero())
            .map(|(i, h)| (i, PairCoef::H(h)))
            .collect(),
    }
}

impl<'a> TripleCtx<'a> {
    fn new(base: &'a GradedPseudoStructure, t: &'a PTriple<'a>) -> Result<Self> {
        let n = base.module.gens();
        if t.f.columns.len() != n || t.g.columns.len() != n {
            return Err(Error::InvalidMap(format!(
                "triple maps list {} and {} columns for {} base generators",
                t.f.columns.len(),
                t.g.columns.len(),
                n
            )));
        }
        let ctx = TripleCtx { base, t };
        if ctx.tmod().kernel != base.module.kernel {
            return Err(Error::KernelMismatch(
                "triple target kernel differs from the base kernel".into(),
            ));
        }
        if let PTarget::Structure(b) = &t.target {
            if b.product.is_none() {
                return Err(Error::Unsupported(
                    "triple target has no product; the conditions need a pseudoproduct".into(),
                ));
            }
        }
        Ok(ctx)
    }

    fn tmod(&self) -> &Module {
        match &self.t.target {
            PTarget::Structure(b) => &b.module,
            PTarget::Envelope(e) => &e.module,
        }
    }

    fn target_name(&self) -> String {
        match &self.t.target {
            PTarget::Structure(b) => b.name.clone(),
            PTarget::Envelope(e) => format!("env({})", e.base.name),
        }
    }

    fn target_grading(&self) -> Grading {
        match &self.t.target {
            PTarget::Structure(b) => b.grading_or_trivial(),
            PTarget::Envelope(e) => e.grading.clone(),
        }
    }

    /// Pseudoproduct of two target elements as a 2-slot tensor.
    fn prod2(&self, x: &MElt, y: &MElt) -> Result<PolyTensor> {
        match &self.t.target {
            PTarget::Envelope(e) => e.product(x, y),
            PTarget::Structure(b) => {
                let module = &b.module;
                if module.kernel.group_order().is_some() && !module.is_free() {
                    // The target table is the diagonal core of its
                    // pseudoproduct: component om multiplies the first
                    // argument by the inverse monomial.
                    let unit = module.kernel.unit_mono();
                    let mut out = PolyTensor::zero(2);
                    for om in module.kernel.basis(0) {
                        let (inv, _) = module.kernel.mono_antipode(&om);
                        let xa = module.act_mono(&inv, x);
                        let p = b.product_eval(&xa, y)?;
                        if !module.elt_is_zero(&p) {
                            out.add_term(module, vec![om, unit.clone()], p);
                        }
                    }
                    return Ok(out);
                }
                let mut out = PolyTensor::zero(2);
                for (i, ci) in decompose(x) {
                    for (j, cj) in decompose(y) {
                        let p =
                            b.product_eval(&module.gen_elt(i), &module.gen_elt(j))?;
                        let emb = PolyTensor::embed(module, 2, &p);
                        let term = match (&ci, &cj) {
                            (PairCoef::R(a), PairCoef::R(bb)) => {
                                let c = *a * *bb;
                                emb.scale(module, &c)
                            }
                            (PairCoef::H(a), PairCoef::H(bb)) => emb
                                .scale_slots(module, &[(*a).clone(), (*bb).clone()])
                                .straighten(module),
                            _ => unreachable!("mixed element presentations"),
                        };
                        out = out.add(module, &term);
                    }
                }
                Ok(out)
            }
        }
    }

    fn embed2(&self, x: &MElt) -> PolyTensor {
        PolyTensor::embed(self.tmod(), 2, x)
    }

    /// Image of the base pseudoproduct of two generators under an H-map,
    /// as a 2-slot tensor over the target.  Over a group kernel with a
    /// finite base the stored table is the diagonal core of the
    /// pseudoproduct, so component om multiplies the first argument by
    /// the inverse monomial; otherwise the value sits in the unit
    /// component alone.
    fn pprod_image(&self, map: &HMap, i: usize, j: usize) -> Result<PolyTensor> {
        let bm = &self.base.module;
        let tmod = self.tmod();
        let gi = bm.gen_elt(i);
        let gj = bm.gen_elt(j);
        if bm.kernel.group_order().is_some() && !bm.is_free() {
            let unit = bm.kernel.unit_mono();
            let mut out = PolyTensor::zero(2);
            for om in bm.kernel.basis(0) {
                let (inv, _) = bm.kernel.mono_antipode(&om);
                let xa = bm.act_mono(&inv, &gi);
                let c = self.base.product_eval(&xa, &gj)?;
                let img = map.apply(bm, tmod, &c);
                if !tmod.elt_is_zero(&img) {
                    out.add_term(tmod, vec![om, unit.clone()], img);
                }
            }
            return Ok(out);
        }
        let c = self.base.product_eval(&gi, &gj)?;
        Ok(self.embed2(&map.apply(bm, tmod, &c)))
    }

    /// Applies a map to the module parts of a base bracket value.
    fn push_map(&self, map: &HMap, b: &PolyTensor) -> PolyTensor {
        let tmod = self.tmod();
        let mut out = PolyTensor::zero(2);
        for (tuple, melt) in b.terms() {
            out.add_term(
                tmod,
                tuple.clone(),
                map.apply(&self.base.module, tmod, melt),
            );
        }
        out.straighten(tmod)
    }

    fn apply_d_target(&self, x: &MElt) -> MElt {
        match &self.t.target {
            PTarget::Structure(b) => b.apply_d(x),
            PTarget::Envelope(e) => e.diff.apply(&e.module, &e.module, x),
        }
    }
}

fn law_alias(law: &str) -> &'static str {
    match law {
        "P1" => "(M-product)",
        "P2" => "(H-bracket)",
        "P3" => "(M-bracket)",
        "P4" => "(H-product)",
        _ => "",
    }
}

/// The four coupling conditions on a generator triple, one record each.
fn condition_records(base: &GradedPseudoStructure, t: &PTriple) -> Result<Vec<LawRecord>> {
    let ctx = TripleCtx::new(base, t)?;
    let tmod = ctx.tmod();
    let n = base.module.gens();
    let p = base.shift();
    let subject = format!("(f, g) into '{}'", ctx.target_name());
    let mut runs: Vec<LawRun> =
        ["P1", "P2", "P3", "P4"].iter().map(|l| LawRun::new(l, &subject)).collect();
    for i in 0..n {
        for j in 0..n {
            let gi = base.module.gen_elt(i);
            let gj = base.module.gen_elt(j);
            let (di, dj) = (base.degree(i), base.degree(j));
            let (fi, fj) = (&t.f.columns[i], &t.f.columns[j]);
            let (gi_img, gj_img) = (&t.g.columns[i], &t.g.columns[j]);
            let name = || format!("(e{}, e{})", i + 1, j + 1);
            if base.product.is_some() {
                let p1 = (|| -> Result<Option<String>> {
                    let lhs = ctx.pprod_image(&t.f, i, j)?;
                    let rhs = ctx.prod2(fi, fj)?;
                    residue_detail(tmod, &lhs.sub(tmod, &rhs))
                })();
                runs[0].instance(name, p1)?;
                let p4 = (|| -> Result<Option<String>> {
                    let lhs = ctx.pprod_image(&t.g, i, j)?;
                    let rhs = ctx.prod2(fi, gj_img)?.add(
                        tmod,
                        &ctx.prod2(fj, gi_img)?.scale(tmod, &sign_pow(di * dj)),
                    );
                    residue_detail(tmod, &lhs.sub(tmod, &rhs))
                })();
                runs[3].instance(name, p4)?;
            }
            if base.bracket.is_some() {
                let brk = base.bracket_eval(&gi, &gj)?;
                let p2 = (|| -> Result<Option<String>> {
                    let lhs = ctx.push_map(&t.g, &brk);
                    let swap = ctx
                        .prod2(gj_img, gi_img)?
                        .apply_perm(tmod, &[1, 0])
                        .scale(tmod, &sign_pow((di + p) * (dj + p)));
                    let rhs = ctx.prod2(gi_img, gj_img)?.sub(tmod, &swap);
                    residue_detail(tmod, &lhs.sub(tmod, &rhs))
                })();
                runs[1].instance(name, p2)?;
                let p3 = (|| -> Result<Option<String>> {
                    let lhs = ctx.push_map(&t.f, &brk);
                    let swap = ctx
                        .prod2(fj, gi_img)?
                        .apply_perm(tmod, &[1, 0])
                        .scale(tmod, &sign_pow((di + p) * dj));
                    let rhs = ctx.prod2(gi_img, fj)?.sub(tmod, &swap);
                    residue_detail(tmod, &lhs.sub(tmod, &rhs))
                })();
                runs[2].instance(name, p3)?;
            }
        }
    }
    Ok(runs.into_iter().map(LawRun::finish).collect())
}

/// The unit relation image: the f-image of the base unit must be the
/// target's unit in the appropriate sense.
fn unit_law(base: &GradedPseudoStructure, t: &PTriple) -> Result<(LawRecord, Vec<String>)> {
    let ctx = TripleCtx::new(base, t)?;
    let tmod = ctx.tmod();
    let mut run = LawRun::new("rel-m-unit", &format!("(f, g) into '{}'", ctx.target_name()));
    let mut notes = Vec::new();
    if base.module.is_free() {
        notes.push(
            "unit detection covers finite-dimensional bases only; the unit relation is not checked here".into(),
        );
        return Ok((run.finish(), notes));
    }
    match find_unit(base.structure())? {
        None => {
            notes.push("base has no two-sided unit; the unit relation is vacuous".into());
        }
        Some(u) => {
            let uelt = MElt::Fin(u);
            let fu = t.f.apply(&base.module, tmod, &uelt);
            match &t.target {
                PTarget::Envelope(e) => {
                    let residue = tmod.elt_sub(&fu, &e.empty_class());
                    run.instance(
                        || "(unit; empty word)".into(),
                        if tmod.elt_is_zero(&residue) {
                            Ok(None)
                        } else {
                            Ok(Some(format!(
                                "f(unit) differs from the empty-word class by {}",
                                tmod.fmt_elt(&residue)
                            )))
                        },
                    )?;
                }
                PTarget::Structure(b) if !b.module.is_free() => {
                    match find_unit(b.structure())? {
                        Some(ub) => {
                            let residue = tmod.elt_sub(&fu, &MElt::Fin(ub));
                            run.instance(
                                || "(unit; unit)".into(),
                                if tmod.elt_is_zero(&residue) {
                                    Ok(None)
                                } else {
                                    Ok(Some(format!(
                                        "f(unit) misses the target unit by {}",
                                        tmod.fmt_elt(&residue)
                                    )))
                                },
                            )?;
                        }
                        None => {
                            run.instance(
                                || "(unit; unit)".into(),
                                Ok(Some("target has no two-sided unit".into())),
                            )?;
                        }
                    }
                }
                PTarget::Structure(_) => {
                    // Free target: no finite unit solve; check the absorbing
                    // behavior of f(unit) against all generator images.
                    let imgs: Vec<(&str, &MElt)> = Vec::new();
                    let _ = imgs;
                    for (which, cols) in
                        [("f", &t.f.columns), ("g", &t.g.columns)]
                    {
                        for (j, img) in cols.iter().enumerate() {
                            let left = (|| -> Result<Option<String>> {
                                let lhs = ctx.prod2(&fu, img)?;
                                residue_detail(tmod, &lhs.sub(tmod, &ctx.embed2(img)))
                            })();
                            run.instance(
                                || format!("(unit, {which} e{}) left", j + 1),
                                left,
                            )?;
                            let right = (|| -> Result<Option<String>> {
                                let lhs = ctx.prod2(img, &fu)?;
                                residue_detail(tmod, &lhs.sub(tmod, &ctx.embed2(img)))
                            })();
                            run.instance(
                                || format!("({which} e{}, unit) right", j + 1),
                                right,
                            )?;
                        }
                    }
                }
            }
        }
    }
    Ok((run.finish(), notes))
}

/// Verifies the four coupling conditions on a triple, plus map linearity,
/// differential compatibility, and the target's own law suite.
pub fn check_ptriple(base: &GradedPseudoStructure, t: &PTriple) -> Result<Report> {
    let ctx = TripleCtx::new(base, t)?;
    let tmod = ctx.tmod();
    let bg = base.grading_or_trivial();
    let tg = ctx.target_grading();
    let mut report = Report::new("verify-triple");
    record_conventions(&mut report, base.structure());
    report.convention(
        "conditions",
        "P1..P4 couple the product letters f and the bracket letters g through the base product and bracket; signs use base degrees and the bracket shift",
    );

    let mut map_records = Vec::new();
    for (which, map, shift) in [("f", &t.f, 0), ("g", &t.g, base.shift())] {
        let mut run = LawRun::new(&format!("{which}-h-linear"), &ctx.target_name());
        run.instance(
            || "(columns intertwine the action)".into(),
            match map.validate(&base.module, tmod) {
                Ok(()) => Ok(None),
                Err(e) => Ok(Some(e.to_string())),
            },
        )?;
        run.instance(
            || "(degree shift)".into(),
            match map.degree_shift(&base.module, tmod, &bg, &tg) {
                Ok(None) => Ok(None),
                Ok(Some(s)) if s == shift => Ok(None),
                Ok(Some(s)) => Ok(Some(format!("degree shift {s}, expected {shift}"))),
                Err(e) => Ok(Some(e.to_string())),
            },
        )?;
        map_records.push(run.finish());
    }
    report.section("maps").records = map_records;

    report.section("conditions").records = condition_records(base, t)?;

    let mut d_records = Vec::new();
    for (which, map) in [("f", &t.f), ("g", &t.g)] {
        let mut run = LawRun::new(&format!("{which}-d-compat"), &ctx.target_name());
        for i in 0..base.module.gens() {
            let lhs = map.apply(
                &base.module,
                tmod,
                &base.apply_d(&base.module.gen_elt(i)),
            );
            let rhs = ctx.apply_d_target(&map.columns[i]);
            let residue = tmod.elt_sub(&lhs, &rhs);
            run.instance(
                || format!("(e{})", i + 1),
                if tmod.elt_is_zero(&residue) {
                    Ok(None)
                } else {
                    Ok(Some(format!("residue {}", tmod.fmt_elt(&residue))))
                },
            )?;
        }
        d_records.push(run.finish());
    }
    report.section("differentials").records = d_records;

    match &t.target {
        PTarget::Structure(b) => {
            let recs = run_suite(b.structure(), SuiteOptions { expect_commutative: false })?;
            let sec = report.section("target-suite");
            sec.notes.push(format!("law suite of target '{}'", b.name));
            sec.records = recs;
        }
        PTarget::Envelope(_) => {
            report
                .section("target-suite")
                .notes
                .push("target is a word-space quotient; its laws are certified at build time".into());
        }
    }
    Ok(report)
}

/// Verifies the relation images of a triple directly: each relation family
/// must land on zero in the target, and the unit relation must match the
/// target's unit.  This is the path that covers polynomial kernels, where
/// no envelope is built.
pub fn check_relation_images(base: &GradedPseudoStructure, t: &PTriple) -> Result<Report> {
    let ctx = TripleCtx::new(base, t)?;
    let mut report = Report::new("verify-triple");
    record_conventions(&mut report, base.structure());
    report.convention(
        "relations",
        "each relation family is evaluated on generator pairs with f for product letters and g for bracket letters",
    );
    let conditions = condition_records(base, t)?;
    let renames =
        ["rel-m-product", "rel-h-bracket", "rel-m-bracket", "rel-h-product"];
    let (unit_rec, unit_notes) = unit_law(base, t)?;
    let sec = report.section("relation-images");
    sec.notes.push(format!("target '{}'", ctx.target_name()));
    for note in unit_notes {
        sec.notes.push(note);
    }
    for (mut r, name) in conditions.into_iter().zip(renames) {
        r.law = name.to_string();
        sec.records.push(r);
    }
    sec.records.push(unit_rec);
    Ok(report)
}

/// Sparse value over the target, with a dense fallback for free targets.
enum PhiVal {
    Fin(SparseVec),
    Gen(MElt),
}

struct PhiOps<'a> {
    tmod: &'a Module,
    /// Sparse columns of each group element's action, finite targets only.
    gcols: Vec<Vec<Vec<(usize, Rat)>>>,
}

impl<'a> PhiOps<'a> {
    fn new(tmod: &'a Module, w: &Words) -> Self {
        let gcols = if tmod.is_free() {
            Vec::new()
        } else {
            (0..w.m)
                .map(|g| {
                    let mat = tmod.mono_matrix(&w.group[g]);
                    (0..mat.cols)
                        .map(|c| {
                            (0..mat.rows)
                                .filter(|&r| !mat[(r, c)].is_zero())
                                .map(|r| (r, mat[(r, c)].clone()))
                                .collect()
                        })
                        .collect()
                })
                .collect()
        };
        PhiOps { tmod, gcols }
    }

    fn zero(&self) -> PhiVal {
        if self.tmod.is_free() {
            PhiVal::Gen(self.tmod.zero_elt())
        } else {
            PhiVal::Fin(SparseVec::new())
        }
    }

    fn from_melt(&self, x: &MElt) -> PhiVal {
        if self.tmod.is_free() {
            PhiVal::Gen(x.clone())
        } else {
            let mut v = SparseVec::new();
            for (i, c) in self.tmod.fin_coords(x).iter().enumerate() {
                if !c.is_zero() {
                    v.insert(i, c.clone());
                }
            }
            PhiVal::Fin(v)
        }
    }

    fn add_scaled(&self, dst: &mut PhiVal, src: &PhiVal, c: &Rat) {
        match (dst, src) {
            (PhiVal::Fin(d), PhiVal::Fin(s)) => {
                for (&i, v) in s {
                    let x = v * c;
                    sv_add(d, i, &x);
                }
            }
            (PhiVal::Gen(d), PhiVal::Gen(s)) => {
                *d = self.tmod.elt_add(d, &self.tmod.elt_scale(s, c));
            }
            _ => unreachable!("mixed value presentations"),
        }
    }

    fn act_group(&self, g: usize, w: &Words, x: &PhiVal) -> PhiVal {
        match x {
            PhiVal::Fin(v) => {
                let mut out = SparseVec::new();
                for (&i, c) in v {
                    for (r, a) in &self.gcols[g][i] {
                        let x = a * c;
                        sv_add(&mut out, *r, &x);
                    }
                }
                PhiVal::Fin(out)
            }
            PhiVal::Gen(m) => PhiVal::Gen(self.tmod.act_mono(&w.group[g], m)),
        }
    }

    fn is_zero(&self, x: &PhiVal) -> bool {
        match x {
            PhiVal::Fin(v) => v.is_empty(),
            PhiVal::Gen(m) => self.tmod.elt_is_zero(m),
        }
    }

    fn to_melt(&self, x: &PhiVal) -> MElt {
        match x {
            PhiVal::Fin(v) => {
                let mut out = vec![Rat::zero(); self.tmod.gens()];
                for (&i, c) in v {
                    out[i] = c.clone();
                }
                MElt::Fin(out)
            }
            PhiVal::Gen(m) => m.clone(),
        }
    }

    fn fmt(&self, x: &PhiVal) -> String {
        self.tmod.fmt_elt(&self.to_melt(x))
    }
}

/// Induces the factoring map out of the envelope for a valid triple: each
/// word class maps to the matching component of the iterated target
/// product of its letter images.  The report certifies well-definedness
/// (every relation row lands on zero), differential compatibility, and the
/// two commutation identities; uniqueness holds because length-one classes
/// generate.
pub fn induce_phi(t: &PTriple, env: &Envelope) -> Result<(HMap, Report)> {
    let base = &env.base;
    let pre = check_ptriple(base, t)?;
    if !pre.passed() {
        let mut fails = Vec::new();
        for sec in &pre.sections {
            for rec in &sec.records {
                if !rec.passed() {
                    let at = rec
                        .witnesses
                        .first()
                        .map(|w| format!(" at {}", w.instance))
                        .unwrap_or_default();
                    let alias = law_alias(&rec.law);
                    let alias = if alias.is_empty() {
                        String::new()
                    } else {
                        format!(" {alias}")
                    };
                    fails.push(format!("{}{alias} fails{at}", rec.law));
                }
            }
        }
        return Err(Error::InvalidMap(format!("triple invalid: {}", fails.join("; "))));
    }

    let ctx = TripleCtx::new(base, t)?;
    let tmod = ctx.tmod();
    let w = &env.words;
    let kernel = &base.module.kernel;
    let ops = PhiOps::new(tmod, w);

    // Iterated left-bracketed products of letter images, per word.
    let imgs: Vec<&MElt> = t.f.columns.iter().chain(t.g.columns.iter()).collect();
    let mut cache: BTreeMap<Vec<usize>, PolyTensor> = BTreeMap::new();
    for idx in 0..w.raw_dim {
        let word = &w.coords[idx].word;
        for l in 1..=word.len() {
            let prefix = word[..l].to_vec();
            if cache.contains_key(&prefix) {
                continue;
            }
            let val = if l == 1 {
                PolyTensor::embed(tmod, 1, imgs[prefix[0]])
            } else {
                let head = cache[&prefix[..l - 1].to_vec()].clone();
                let last = PolyTensor::embed(tmod, 1, imgs[prefix[l - 1]]);
                let table = |a: &MElt, b: &MElt| ctx.prod2(a, b);
                head.compose(tmod, &last, &table)?
            };
            cache.insert(prefix, val);
        }
    }

    // The empty word is the envelope's own core unit, so a multiplicative
    // extension sends it to the target's: the f-image of the base unit
    // when the unit relation pins it, else the target envelope's empty
    // class or the target table's unit.  Without any of those no relation
    // constrains the empty word and zero is the recorded convention.
    let phi_empty = match &env.unit_coords {
        Some(u) => ops.from_melt(&t.f.apply(&base.module, tmod, &MElt::Fin(u.clone()))),
        None => match &t.target {
            PTarget::Envelope(e) => ops.from_melt(&e.empty_class()),
            PTarget::Structure(b) => match find_unit(b.structure())? {
                Some(u) => ops.from_melt(&MElt::Fin(u)),
                None => ops.zero(),
            },
        },
    };

    let phi_raw: Vec<PhiVal> = (0..w.raw_dim)
        .map(|idx| {
            let c = &w.coords[idx];
            let body = if c.layer == 0 {
                let mut v = ops.zero();
                ops.add_scaled(&mut v, &phi_empty, &Rat::one());
                v
            } else {
                let val = &cache[&c.word];
                let unit = kernel.unit_mono();
                let mut v = ops.zero();
                for (tuple, melt) in val.terms() {
                    let matches = tuple[c.layer - 1] == unit
                        && (0..c.layer - 1).all(|s| tuple[s] == w.group[c.tau[s]]);
                    if matches {
                        ops.add_scaled(&mut v, &ops.from_melt(melt), &Rat::one());
                    }
                }
                v
            };
            ops.act_group(c.di, w, &body)
        })
        .collect();

    let phi = HMap {
        columns: env.free.iter().map(|&idx| ops.to_melt(&phi_raw[idx])).collect(),
    };

    let mut report = Report::new("induce-phi");
    record_conventions(&mut report, base.structure());
    report.convention(
        "factorization",
        "a word class maps to the component of the iterated target product of its letter images selected by its junction tuple, translated by its lead; the empty word maps to the target's unit when one exists, else to zero",
    );

    let row_image = |row: &SparseVec| -> PhiVal {
        let mut v = ops.zero();
        for (&i, c) in row {
            ops.add_scaled(&mut v, &phi_raw[i], c);
        }
        v
    };
    let zero_or = |v: &PhiVal| -> Result<Option<String>> {
        if ops.is_zero(v) {
            Ok(None)
        } else {
            Ok(Some(format!("image {}", ops.fmt(v))))
        }
    };

    let mut relations = LawRun::new("phi-relations", "family seeds");
    let seeds = family_rows(base, w, env.unit_coords.as_deref())?;
    for seed in &seeds {
        let img = row_image(&seed.row);
        relations.instance(|| format!("{} {}", seed.family, seed.instance), zero_or(&img))?;
    }
    let mut straightening = LawRun::new("phi-straightening", "straightening rows");
    for row in w.rel_rows() {
        let img = row_image(&row);
        let first = *row.keys().next().expect("nonempty row");
        straightening.instance(
            || format!("row led by {}", w.fmt_idx(kernel, first)),
            zero_or(&img),
        )?;
    }
    let mut span_run = LawRun::new("phi-span", "eliminated rows");
    for (piv, row) in env.span.rows() {
        let img = row_image(row);
        span_run.instance(
            || format!("row eliminating {}", w.fmt_idx(kernel, *piv)),
            zero_or(&img),
        )?;
    }

    let mut dcompat = LawRun::new("phi-d-compat", "letter classes");
    for x in 0..w.nlet {
        let cls = MElt::Fin(env.project(&sv_single(w.letter_index(x))));
        let lhs = phi.apply(
            &env.module,
            tmod,
            &env.diff.apply(&env.module, &env.module, &cls),
        );
        let rhs = ctx.apply_d_target(&phi.apply(&env.module, tmod, &cls));
        let residue = tmod.elt_sub(&lhs, &rhs);
        dcompat.instance(
            || w.letter_name(x),
            if tmod.elt_is_zero(&residue) {
                Ok(None)
            } else {
                Ok(Some(format!("residue {}", tmod.fmt_elt(&residue))))
            },
        )?;
    }

    let mut commute = LawRun::new("phi-bi-commute", "base generators");
    for (which, emb, map) in [("M", &env.m_map, &t.f), ("H", &env.h_map, &t.g)] {
        for i in 0..base.module.gens() {
            let lhs = phi.apply(&env.module, tmod, &emb.columns[i]);
            let residue = tmod.elt_sub(&lhs, &map.columns[i]);
            commute.instance(
                || format!("phi {which}(e{})", i + 1),
                if tmod.elt_is_zero(&residue) {
                    Ok(None)
                } else {
                    Ok(Some(format!("residue {}", tmod.fmt_elt(&residue))))
                },
            )?;
        }
    }

    let sec = report.section("factorization");
    sec.notes.push(format!(
        "{} word classes mapped into '{}'",
        env.dim(),
        ctx.target_name()
    ));
    sec.notes.push(
        "uniqueness: length-one classes generate, so a factoring map is determined by the letter images".into(),
    );
    sec.records.push(relations.finish());
    sec.records.push(straightening.finish());
    sec.records.push(span_run.finish());
    sec.records.push(dcompat.finish());
    sec.records.push(commute.finish());
    Ok((phi, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use crate::structure::{Bracket, Product};
    use proptest::prelude::*;

    fn fin(v: Vec<i64>) -> MElt {
        MElt::Fin(v.into_iter().map(rat).collect())
    }

    fn graded(mut s: PseudoStructure, degrees: Vec<i64>, p: i64) -> GradedPseudoStructure {
        if s.differential.is_none() {
            s.differential = Some(HMap::zero(&s.module, &s.module));
        }
        s.grading = Some(Grading { degrees, p });
        GradedPseudoStructure::new(s).unwrap()
    }

    fn structureless(
        kernel: Kernel,
        action: Vec<Mat>,
        degrees: Vec<i64>,
    ) -> GradedPseudoStructure {
        let module = Module::finite(&kernel, action).unwrap();
        graded(PseudoStructure::new("plain", module), degrees, 0)
    }

    /// Straightening absorbs the lead and every junction tag into the
    /// letters (the relation rows shift them onto group-acted letters one
    /// generator at a time), so each layer keeps one class per plain word:
    /// dim = m (empty-word layer) + sum of (2n)^l over word layers.
    fn free_word_count(m: usize, n: usize, bound: usize) -> usize {
        m + (1..=bound).map(|l| (2 * n).pow(l as u32)).sum::<usize>()
    }

    /// Sign-and-swap action of Z/2 on a 4-dim base: a fixed, u and v
    /// swapped, w negated.
    fn swirl_action() -> Mat {
        Mat::from_rows(vec![
            vec![rat(1), rat(0), rat(0), rat(0)],
            vec![rat(0), rat(0), rat(1), rat(0)],
            vec![rat(0), rat(1), rat(0), rat(0)],
            vec![rat(0), rat(0), rat(0), rat(-1)],
        ])
    }

    /// Non-unital graded base over k[Z/2]: generators a(0), u(1), v(1),
    /// w(2); u v = w = -v u; brackets of a with u, v land in (1 +- g)-spread
    /// copies of w; d sends u to w and v to -w.
    fn swirl() -> GradedPseudoStructure {
        let kernel = Kernel::Group { orders: vec![2] };
        let module = Module::finite(&kernel, vec![swirl_action()]).unwrap();
        let z = fin(vec![0, 0, 0, 0]);
        let mut table = vec![vec![z.clone(); 4]; 4];
        table[1][2] = fin(vec![0, 0, 0, 1]);
        table[2][1] = fin(vec![0, 0, 0, -1]);
        let unit = kernel.unit_mono();
        let g = kernel.gen_mono(0);
        let spread = |s1: i64, s2: i64| {
            let mut t = PolyTensor::zero(2);
            t.add_term(&module, vec![unit.clone(), unit.clone()], fin(vec![0, 0, 0, s1]));
            t.add_term(&module, vec![g.clone(), unit.clone()], fin(vec![0, 0, 0, s2]));
            t
        };
        let mut entries = BTreeMap::new();
        entries.insert((0, 1), spread(1, 1));
        entries.insert((0, 2), spread(-1, -1));
        entries.insert((1, 0), spread(-1, 1));
        entries.insert((2, 0), spread(1, -1));
        let d = HMap {
            columns: vec![z.clone(), fin(vec![0, 0, 0, 1]), fin(vec![0, 0, 0, -1]), z],
        };
        let mut s = PseudoStructure::new("swirl", module);
        s.product = Some(Product::table(table));
        s.bracket = Some(Bracket::new(entries));
        s.differential = Some(d);
        graded(s, vec![0, 1, 1, 2], 1)
    }

    /// Unital commutative base over the trivial group: 1, a, b, c with
    /// a b = 0 and the bracket {a, b} = c, {b, a} = -c.
    fn unital_heisenberg() -> GradedPseudoStructure {
        let kernel = Kernel::Group { orders: vec![1] };
        let module = Module::finite(&kernel, vec![Mat::identity(4)]).unwrap();
        let z = fin(vec![0, 0, 0, 0]);
        let mut table = vec![vec![z; 4]; 4];
        for j in 0..4 {
            let mut e = vec![0; 4];
            e[j] = 1;
            table[0][j] = fin(e.clone());
            table[j][0] = fin(e);
        }
        let mut entries = BTreeMap::new();
        entries.insert((1, 2), PolyTensor::embed(&module, 2, &fin(vec![0, 0, 0, 1])));
        entries.insert((2, 1), PolyTensor::embed(&module, 2, &fin(vec![0, 0, 0, -1])));
        let mut s = PseudoStructure::new("unital-heisenberg", module);
        s.product = Some(Product::table(table));
        s.bracket = Some(Bracket::new(entries));
        graded(s, vec![0; 4], 0)
    }

    /// Bracket-only base over the trivial group: {a, b} = c and no product,
    /// so only the bracket conditions have instances.
    fn bracket_heisenberg() -> GradedPseudoStructure {
        let kernel = Kernel::Group { orders: vec![1] };
        let module = Module::finite(&kernel, vec![Mat::identity(3)]).unwrap();
        let mut entries = BTreeMap::new();
        entries.insert((0, 1), PolyTensor::embed(&module, 2, &fin(vec![0, 0, 1])));
        entries.insert((1, 0), PolyTensor::embed(&module, 2, &fin(vec![0, 0, -1])));
        let mut s = PseudoStructure::new("bracket-heisenberg", module);
        s.bracket = Some(Bracket::new(entries));
        graded(s, vec![0; 3], 0)
    }

    fn build(base: GradedPseudoStructure, bound: usize) -> (Envelope, Report) {
        build_envelope_truncated(&EnvelopePresentation { base, word_bound: bound }).unwrap()
    }

    #[test]
    fn trivial_kernel_minimal_basis() {
        let base = structureless(
            Kernel::Group { orders: vec![1] },
            vec![Mat::identity(1)],
            vec![0],
        );
        let (env, report) = build(base, 1);
        assert!(report.passed(), "{}", report.render_text());
        assert_eq!(env.dim(), 3);
        let layers: Vec<usize> = (0..env.dim()).map(|k| env.basis_layer(k)).collect();
        assert_eq!(layers, vec![1, 1, 0]);
    }

    #[test]
    fn free_word_counts_match_formula() {
        for (orders, n, bound) in
            [(vec![1], 1, 2), (vec![2], 1, 3), (vec![3], 1, 2), (vec![2], 2, 2)]
        {
            let kernel = Kernel::Group { orders };
            let m = kernel.group_order().unwrap() as usize;
            let base = structureless(kernel, vec![Mat::identity(n)], vec![0; n]);
            let (env, _) = build(base, bound);
            assert_eq!(env.dim(), free_word_count(m, n, bound), "m={m} n={n} L={bound}");
        }
        // Nontrivial sign-and-swap action: the straightening rank per layer
        // is action-independent.
        let base = structureless(
            Kernel::Group { orders: vec![2] },
            vec![swirl_action()],
            vec![0, 1, 1, 2],
        );
        let (env, _) = build(base, 2);
        assert_eq!(env.dim(), free_word_count(2, 4, 2));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn free_word_counts_match_formula_random(
            m in 1usize..=3,
            n in 1usize..=2,
            bound in 1usize..=2,
        ) {
            let kernel = Kernel::Group { orders: vec![m as u64] };
            let base = structureless(kernel, vec![Mat::identity(n)], vec![0; n]);
            let (env, _) = build(base, bound);
            prop_assert_eq!(env.dim(), free_word_count(m, n, bound));
        }
    }

    #[test]
    fn product_outside_truncation_reported() {
        let base = structureless(
            Kernel::Group { orders: vec![2] },
            vec![Mat::identity(1)],
            vec![0],
        );
        let (env, _) = build(base, 2);
        let k2 = (0..env.dim()).find(|&k| env.basis_layer(k) == 2).unwrap();
        let mut e = vec![0; env.dim()];
        e[k2] = 1;
        let long = fin(e);
        let err = env.product(&long, &long).unwrap_err();
        assert!(matches!(err, Error::OutOfRange(_)));
        assert!(err.to_string().contains("outside truncation"), "{err}");
    }

    #[test]
    fn unital_base_over_nontrivial_group_keeps_unit() {
        // Unital line over Z/2: the unit row glues the product letter to
        // the empty word, the spread product rows then absorb every mixed
        // word and kill the odd letter, and only the empty word and the
        // square of the odd letter survive the bound.
        let kernel = Kernel::Group { orders: vec![2] };
        let module = Module::finite(&kernel, vec![Mat::identity(1)]).unwrap();
        let mut s = PseudoStructure::new("line", module);
        s.product = Some(Product::table(vec![vec![fin(vec![1])]]));
        let base = graded(s, vec![0], 0);
        let (env, report) = build(base, 2);
        assert!(report.passed(), "{}", report.render_text());
        assert_eq!(env.dim(), 2);
        let layers: Vec<usize> = (0..2).map(|k| env.basis_layer(k)).collect();
        assert_eq!(layers, vec![2, 0]);
        let u = fin(vec![1]);
        let fu = env.m_map().apply(&env.base().module, env.module(), &u);
        let residue = env.module().elt_sub(&fu, &env.empty_class());
        assert!(env.module().elt_is_zero(&residue));
        let hu = env.h_map().apply(&env.base().module, env.module(), &u);
        assert!(env.module().elt_is_zero(&hu));
        assert!(env.unit_class().is_some());
    }

    #[test]
    fn unital_trivial_kernel_truncation_boundary() {
        // Same unital line over the trivial group, zero bracket: the unit's
        // letters are absorbed and only the longest pure bracket word and
        // the empty word survive; the certificate killing the length-bound
        // bracket word needs words one step past the bound.
        for bound in [2, 3] {
            let kernel = Kernel::Group { orders: vec![1] };
            let module = Module::finite(&kernel, vec![Mat::identity(1)]).unwrap();
            let mut s = PseudoStructure::new("line", module);
            s.product = Some(Product::table(vec![vec![fin(vec![1])]]));
            s.bracket = Some(Bracket::new(BTreeMap::new()));
            let base = graded(s, vec![0], 0);
            let (env, report) = build(base, bound);
            assert!(report.passed(), "{}", report.render_text());
            assert_eq!(env.dim(), 2);
            let layers: Vec<usize> = (0..2).map(|k| env.basis_layer(k)).collect();
            assert_eq!(layers, vec![bound, 0]);
            let u = fin(vec![1]);
            let fu = env.m_map().apply(&env.base().module, env.module(), &u);
            let residue = env.module().elt_sub(&fu, &env.empty_class());
            assert!(env.module().elt_is_zero(&residue));
            let hu = env.h_map().apply(&env.base().module, env.module(), &u);
            assert!(env.module().elt_is_zero(&hu));
            assert!(env.unit_class().is_some());
        }
    }

    #[test]
    fn unital_heisenberg_identifies_unit_classes() {
        let base = unital_heisenberg();
        let (env, report) = build(base, 2);
        assert!(report.passed(), "{}", report.render_text());
        let u = fin(vec![1, 0, 0, 0]);
        let fu = env.m_map().apply(&env.base().module, env.module(), &u);
        let residue = env.module().elt_sub(&fu, &env.empty_class());
        assert!(env.module().elt_is_zero(&residue));
        let hu = env.h_map().apply(&env.base().module, env.module(), &u);
        assert!(env.module().elt_is_zero(&hu));
    }

    #[test]
    fn polynomial_kernel_is_unsupported() {
        let kernel = Kernel::Polynomial { vars: 1 };
        let module = Module::free(&kernel, 1);
        let mut s = PseudoStructure::new("cur", module);
        s.product = Some(Product::first_slot(vec![vec![vec![rat(1)]]]));
        let base = graded(s, vec![0], 0);
        let err = build_envelope_truncated(&EnvelopePresentation::new(base)).unwrap_err();
        assert!(matches!(err, Error::Unsupported(_)), "{err}");
    }

    #[test]
    fn polynomial_kernel_triple_checks_pass() {
        let kernel = Kernel::Polynomial { vars: 1 };
        let module = Module::free(&kernel, 1);
        let mut s = PseudoStructure::new("cur", module);
        s.product = Some(Product::first_slot(vec![vec![vec![rat(1)]]]));
        let base = graded(s, vec![0], 0);
        let t = PTriple {
            target: PTarget::Structure(&base),
            f: HMap::identity(&base.module),
            g: HMap::zero(&base.module, &base.module),
        };
        let report = check_ptriple(&base, &t).unwrap();
        assert!(report.passed(), "{}", report.render_text());
        let report = check_relation_images(&base, &t).unwrap();
        assert!(report.passed(), "{}", report.render_text());
    }

    #[test]
    fn swirl_envelope_self_checks() {
        let base = swirl();
        let (env, report) = build(base, 2);
        assert!(report.passed(), "{}", report.render_text());
        assert!(env.dim() > 0);
        assert!(env.unit_class().is_none());
        // The empty word squares to its spread over both components.
        let sq = env.product(&env.empty_class(), &env.empty_class()).unwrap();
        assert_eq!(sq.num_terms(), 2);
        for (_, m) in sq.terms() {
            let residue = env.module().elt_sub(m, &env.empty_class());
            assert!(env.module().elt_is_zero(&residue));
        }
        let shift = env
            .differential()
            .degree_shift(env.module(), env.module(), env.grading(), env.grading())
            .unwrap();
        assert!(matches!(shift, None | Some(1)));
    }

    #[test]
    fn swirl_differential_certificate() {
        let base = swirl();
        let (env, _) = build(base, 2);
        let (d, report) = derive_differential(&env).unwrap();
        assert!(report.passed(), "{}", report.render_text());
        // d commutes with the product-letter embedding.
        let du = env.base().apply_d(&fin(vec![0, 1, 0, 0]));
        let lhs = d.apply(env.module(), env.module(), &env.m_map().columns[1]);
        let rhs = env.m_map().apply(&env.base().module, env.module(), &du);
        assert!(env.module().elt_is_zero(&env.module().elt_sub(&lhs, &rhs)));
    }

    #[test]
    fn swirl_self_triple_induces_identity() {
        let base = swirl();
        let (env, _) = build(base, 2);
        let t = PTriple {
            target: PTarget::Envelope(&env),
            f: env.m_map().clone(),
            g: env.h_map().clone(),
        };
        let report = check_ptriple(env.base(), &t).unwrap();
        assert!(report.passed(), "{}", report.render_text());
        let (phi, report) = induce_phi(&t, &env).unwrap();
        assert!(report.passed(), "{}", report.render_text());
        for (k, col) in phi.columns.iter().enumerate() {
            let mut e = vec![0; env.dim()];
            e[k] = 1;
            let residue = env.module().elt_sub(col, &fin(e));
            assert!(env.module().elt_is_zero(&residue), "class {k}");
        }
    }

    #[test]
    fn bracket_condition_violation_is_rejected() {
        let base = bracket_heisenberg();
        let (env, report) = build(base, 2);
        assert!(report.passed(), "{}", report.render_text());
        let good = PTriple {
            target: PTarget::Envelope(&env),
            f: env.m_map().clone(),
            g: env.h_map().clone(),
        };
        assert!(check_ptriple(env.base(), &good).unwrap().passed());
        // Flipping the sign of the product letter of c breaks the coupling
        // of f to the bracket and nothing else.
        let mut f = env.m_map().clone();
        f.columns[2] = env.module().elt_scale(&f.columns[2], &rat(-1));
        let bad = PTriple { target: PTarget::Envelope(&env), f, g: env.h_map().clone() };
        let report = check_ptriple(env.base(), &bad).unwrap();
        assert!(!report.passed());
        let failing: Vec<&str> = report
            .sections
            .iter()
            .flat_map(|s| s.records.iter())
            .filter(|r| !r.passed())
            .map(|r| r.law.as_str())
            .collect();
        assert_eq!(failing, vec!["P3"]);
        let err = induce_phi(&bad, &env).unwrap_err();
        assert!(matches!(err, Error::InvalidMap(_)));
        let msg = err.to_string();
        assert!(msg.contains("P3 (M-bracket)"), "{msg}");
        assert!(msg.contains("(e1, e2)"), "{msg}");
    }
}
