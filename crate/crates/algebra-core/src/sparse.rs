//! Sparse distributed multivariate polynomials with heap-based kernels.
//!
//! Terms are kept strictly sorted in descending graded-lexicographic order
//! with nonzero coefficients. Exponent vectors are packed into a single
//! machine word (total degree in the top field so a `u64` comparison is the
//! monomial order) whenever the layout fits; otherwise a plain `u32` row per
//! term is used. The packing is canonical: the smallest layout that fits the
//! polynomial's total degree, so equal polynomials have equal
//! representations.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::ring::{base_ring, coerce_int, one, rings_equal, zero, Elem, Repr, Ring, RingKind};

/// Packed layouts on offer: `(nvars + 1) * bits <= 64` and the total degree
/// must stay below `2^bits`.
const BITS_MENU: [u32; 3] = [8, 16, 32];

pub fn choose_bits(nvars: usize, max_total_deg: u64) -> Option<u32> {
    BITS_MENU
        .iter()
        .copied()
        .find(|&b| (nvars as u32 + 1) * b <= 64 && max_total_deg < (1u64 << b))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SparseTerms {
    pub nvars: usize,
    /// Packed bits per field; 0 selects the wide (unpacked) layout.
    pub bits: u32,
    pub coeffs: Vec<Elem>,
    /// One packed key per term when `bits > 0`.
    pub packed: Vec<u64>,
    /// `nvars + 1` entries per term ([total degree, e_0, ..]) when `bits == 0`.
    pub wide: Vec<u32>,
}

impl SparseTerms {
    pub fn zero(nvars: usize) -> Self {
        SparseTerms { nvars, bits: 8, coeffs: Vec::new(), packed: Vec::new(), wide: Vec::new() }
    }

    pub fn constant(nvars: usize, c: Elem) -> Self {
        if c.is_zero() {
            return Self::zero(nvars);
        }
        SparseTerms { nvars, bits: 8, coeffs: vec![c], packed: vec![0], wide: Vec::new() }
    }

    pub fn gen(nvars: usize, i: usize, one: Elem) -> Self {
        let mut exps = vec![0u32; nvars];
        exps[i] = 1;
        let key = pack_key(8, nvars, &exps);
        SparseTerms { nvars, bits: 8, coeffs: vec![one], packed: vec![key], wide: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        match self.len() {
            0 => true,
            1 => self.term_total_deg(0) == 0,
            _ => false,
        }
    }

    pub fn is_constant_one(&self) -> bool {
        self.len() == 1 && self.term_total_deg(0) == 0 && self.coeffs[0].is_one()
    }

    pub fn term_exps(&self, idx: usize) -> Vec<u32> {
        if self.bits > 0 {
            unpack_key(self.bits, self.nvars, self.packed[idx])
        } else {
            self.wide[idx * (self.nvars + 1) + 1..(idx + 1) * (self.nvars + 1)].to_vec()
        }
    }

    pub fn term_total_deg(&self, idx: usize) -> u64 {
        if self.bits > 0 {
            self.packed[idx] >> (self.bits * self.nvars as u32)
        } else {
            self.wide[idx * (self.nvars + 1)] as u64
        }
    }

    pub fn max_total_deg(&self) -> u64 {
        (0..self.len()).map(|i| self.term_total_deg(i)).max().unwrap_or(0)
    }

    /// Degree in one variable.
    pub fn degree_in(&self, var: usize) -> u64 {
        (0..self.len()).map(|i| self.term_exps(i)[var] as u64).max().unwrap_or(0)
    }

    pub fn map_coeffs(&self, f: impl Fn(&Elem) -> Elem) -> Self {
        SparseTerms {
            nvars: self.nvars,
            bits: self.bits,
            coeffs: self.coeffs.iter().map(f).collect(),
            packed: self.packed.clone(),
            wide: self.wide.clone(),
        }
    }
}

pub fn pack_key(bits: u32, nvars: usize, exps: &[u32]) -> u64 {
    debug_assert_eq!(exps.len(), nvars);
    let deg: u64 = exps.iter().map(|&e| e as u64).sum();
    let mut key = deg;
    for &e in exps {
        key = (key << bits) | e as u64;
    }
    key
}

pub fn unpack_key(bits: u32, nvars: usize, key: u64) -> Vec<u32> {
    let mask = if bits == 32 { u32::MAX as u64 } else { (1u64 << bits) - 1 };
    let mut exps = vec![0u32; nvars];
    let mut k = key;
    for i in (0..nvars).rev() {
        exps[i] = (k & mask) as u32;
        k >>= bits;
    }
    exps
}

// ---------------------------------------------------------------------------
// Monomial contexts: packed word vs wide rows
// ---------------------------------------------------------------------------

pub trait MonCtx {
    type M: Clone + Ord;
    fn add(&self, a: &Self::M, b: &Self::M) -> Self::M;
    /// a - b when b divides a (componentwise <=).
    fn try_sub(&self, a: &Self::M, b: &Self::M) -> Option<Self::M>;
    fn unit(&self) -> Self::M;
}

pub struct PackedCtx {
    pub nvars: usize,
    pub bits: u32,
}

impl MonCtx for PackedCtx {
    type M = u64;

    #[inline]
    fn add(&self, a: &u64, b: &u64) -> u64 {
        a + b
    }

    fn try_sub(&self, a: &u64, b: &u64) -> Option<u64> {
        let ea = unpack_key(self.bits, self.nvars, *a);
        let eb = unpack_key(self.bits, self.nvars, *b);
        for i in 0..self.nvars {
            if ea[i] < eb[i] {
                return None;
            }
        }
        Some(a - b)
    }

    fn unit(&self) -> u64 {
        0
    }
}

pub struct WideCtx {
    pub nvars: usize,
}

impl MonCtx for WideCtx {
    type M = Vec<u32>;

    fn add(&self, a: &Vec<u32>, b: &Vec<u32>) -> Vec<u32> {
        a.iter().zip(b.iter()).map(|(x, y)| x + y).collect()
    }

    fn try_sub(&self, a: &Vec<u32>, b: &Vec<u32>) -> Option<Vec<u32>> {
        let mut out = Vec::with_capacity(a.len());
        for (x, y) in a.iter().zip(b.iter()) {
            if x < y {
                return None;
            }
            out.push(x - y);
        }
        Some(out)
    }

    fn unit(&self) -> Vec<u32> {
        vec![0; self.nvars + 1]
    }
}

// ---------------------------------------------------------------------------
// Construction and layout management
// ---------------------------------------------------------------------------

/// Build canonical terms from (coefficient, exponent vector) pairs; merges
/// duplicates and drops zeros.
pub fn from_pairs(ring: &Ring, pairs: Vec<(Elem, Vec<u32>)>) -> Result<Elem> {
    let nvars = match &ring.kind {
        RingKind::MultiPolyRing { vars, .. } => vars.len(),
        _ => return Err(Error::InvalidParameter("not a multivariate ring".into())),
    };
    let mut keyed: Vec<(Vec<u32>, Elem)> = pairs
        .into_iter()
        .map(|(c, e)| {
            assert_eq!(e.len(), nvars);
            let deg: u64 = e.iter().map(|&x| x as u64).sum();
            let mut row = Vec::with_capacity(nvars + 1);
            row.push(deg as u32);
            row.extend_from_slice(&e);
            (row, c)
        })
        .collect();
    keyed.sort_by(|a, b| b.0.cmp(&a.0));
    let mut terms: Vec<(Vec<u32>, Elem)> = Vec::new();
    for (k, c) in keyed {
        if let Some(last) = terms.last_mut() {
            if last.0 == k {
                last.1 = last.1.add(&c)?;
                continue;
            }
        }
        terms.push((k, c));
    }
    terms.retain(|(_, c)| !c.is_zero());
    let maxdeg = terms.iter().map(|(k, _)| k[0] as u64).max().unwrap_or(0);
    let st = match choose_bits(nvars, maxdeg) {
        Some(bits) => {
            let mut packed = Vec::with_capacity(terms.len());
            let mut coeffs = Vec::with_capacity(terms.len());
            for (k, c) in terms {
                packed.push(pack_key(bits, nvars, &k[1..]));
                coeffs.push(c);
            }
            SparseTerms { nvars, bits, coeffs, packed, wide: Vec::new() }
        }
        None => {
            let mut wide = Vec::with_capacity(terms.len() * (nvars + 1));
            let mut coeffs = Vec::with_capacity(terms.len());
            for (k, c) in terms {
                wide.extend_from_slice(&k);
                coeffs.push(c);
            }
            SparseTerms { nvars, bits: 0, coeffs, packed: Vec::new(), wide }
        }
    };
    Ok(Elem { ring: ring.clone(), repr: Repr::Sparse(st) })
}

/// Re-encode with the canonical layout for the given maximum total degree.
fn relayout(t: &SparseTerms, target_bits: Option<u32>) -> SparseTerms {
    match target_bits {
        Some(bits) if bits == t.bits => t.clone(),
        Some(bits) => {
            let packed =
                (0..t.len()).map(|i| pack_key(bits, t.nvars, &t.term_exps(i))).collect();
            SparseTerms {
                nvars: t.nvars,
                bits,
                coeffs: t.coeffs.clone(),
                packed,
                wide: Vec::new(),
            }
        }
        None => {
            if t.bits == 0 {
                return t.clone();
            }
            let mut wide = Vec::with_capacity(t.len() * (t.nvars + 1));
            for i in 0..t.len() {
                wide.push(t.term_total_deg(i) as u32);
                wide.extend_from_slice(&t.term_exps(i));
            }
            SparseTerms { nvars: t.nvars, bits: 0, coeffs: t.coeffs.clone(), packed: Vec::new(), wide }
        }
    }
}

/// Canonical layout after an operation whose result has total degree
/// `maxdeg`.
fn canonical_layout(t: SparseTerms) -> SparseTerms {
    let maxdeg = t.max_total_deg();
    let want = choose_bits(t.nvars, maxdeg);
    match (want, t.bits) {
        (Some(b), cur) if b == cur => t,
        (None, 0) => t,
        (want, _) => relayout(&t, want),
    }
}

/// Bring two operands to a common layout able to hold total degree `cap`.
fn unify(a: &SparseTerms, b: &SparseTerms, cap: u64) -> (SparseTerms, SparseTerms, Option<u32>) {
    let nvars = a.nvars;
    let target = choose_bits(nvars, cap);
    (relayout(a, target), relayout(b, target), target)
}

// ---------------------------------------------------------------------------
// Addition (sorted merge)
// ---------------------------------------------------------------------------

pub fn add(base: &Ring, a: &SparseTerms, b: &SparseTerms) -> Result<SparseTerms> {
    let cap = a.max_total_deg().max(b.max_total_deg());
    let (a, b, bits) = unify(a, b, cap);
    let out = match bits {
        Some(bits) => {
            let ctx = PackedCtx { nvars: a.nvars, bits };
            let (mons, coeffs) = merge_add(&ctx, &a.packed, &a.coeffs, &b.packed, &b.coeffs)?;
            SparseTerms { nvars: a.nvars, bits, coeffs, packed: mons, wide: Vec::new() }
        }
        None => {
            let ctx = WideCtx { nvars: a.nvars };
            let am = wide_rows(&a);
            let bm = wide_rows(&b);
            let (mons, coeffs) = merge_add(&ctx, &am, &a.coeffs, &bm, &b.coeffs)?;
            flatten_wide(a.nvars, mons, coeffs)
        }
    };
    let _ = base;
    Ok(canonical_layout(out))
}

fn wide_rows(t: &SparseTerms) -> Vec<Vec<u32>> {
    (0..t.len()).map(|i| t.wide[i * (t.nvars + 1)..(i + 1) * (t.nvars + 1)].to_vec()).collect()
}

fn flatten_wide(nvars: usize, mons: Vec<Vec<u32>>, coeffs: Vec<Elem>) -> SparseTerms {
    let mut wide = Vec::with_capacity(mons.len() * (nvars + 1));
    for m in mons {
        wide.extend_from_slice(&m);
    }
    SparseTerms { nvars, bits: 0, coeffs, packed: Vec::new(), wide }
}

fn merge_add<C: MonCtx>(
    _ctx: &C,
    am: &[C::M],
    ac: &[Elem],
    bm: &[C::M],
    bc: &[Elem],
) -> Result<(Vec<C::M>, Vec<Elem>)> {
    let mut mons = Vec::with_capacity(am.len() + bm.len());
    let mut coeffs = Vec::with_capacity(am.len() + bm.len());
    let (mut i, mut j) = (0, 0);
    while i < am.len() || j < bm.len() {
        let take_a = match (am.get(i), bm.get(j)) {
            (Some(x), Some(y)) => {
                if x == y {
                    let s = ac[i].add(&bc[j])?;
                    i += 1;
                    j += 1;
                    if !s.is_zero() {
                        mons.push(x.clone());
                        coeffs.push(s);
                    }
                    continue;
                }
                x > y
            }
            (Some(_), None) => true,
            (None, Some(_)) => false,
            (None, None) => unreachable!(),
        };
        if take_a {
            mons.push(am[i].clone());
            coeffs.push(ac[i].clone());
            i += 1;
        } else {
            mons.push(bm[j].clone());
            coeffs.push(bc[j].clone());
            j += 1;
        }
    }
    Ok((mons, coeffs))
}

// ---------------------------------------------------------------------------
// Heap multiplication (Johnson)
// ---------------------------------------------------------------------------

struct HeapEntry<M: Ord> {
    mon: M,
    small: u32,
    big: u32,
}

impl<M: Ord> PartialEq for HeapEntry<M> {
    fn eq(&self, other: &Self) -> bool {
        self.mon == other.mon
    }
}
impl<M: Ord> Eq for HeapEntry<M> {}
impl<M: Ord> PartialOrd for HeapEntry<M> {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl<M: Ord> Ord for HeapEntry<M> {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        self.mon.cmp(&other.mon)
    }
}

pub fn heap_mul(base: &Ring, a: &SparseTerms, b: &SparseTerms) -> Result<SparseTerms> {
    if a.is_empty() || b.is_empty() {
        return Ok(SparseTerms::zero(a.nvars));
    }
    let cap = a.max_total_deg() + b.max_total_deg();
    let (a, b, bits) = unify(a, b, cap);
    // keep at most min(#a, #b) entries live in the heap
    let (small, big) = if a.len() <= b.len() { (&a, &b) } else { (&b, &a) };
    let out = match bits {
        Some(bits) => {
            let ctx = PackedCtx { nvars: a.nvars, bits };
            let (mons, coeffs) = heap_mul_ctx(
                base,
                &ctx,
                &small.packed,
                &small.coeffs,
                &big.packed,
                &big.coeffs,
            )?;
            SparseTerms { nvars: a.nvars, bits, coeffs, packed: mons, wide: Vec::new() }
        }
        None => {
            let ctx = WideCtx { nvars: a.nvars };
            let sm = wide_rows(small);
            let bm = wide_rows(big);
            let (mons, coeffs) =
                heap_mul_ctx(base, &ctx, &sm, &small.coeffs, &bm, &big.coeffs)?;
            flatten_wide(a.nvars, mons, coeffs)
        }
    };
    Ok(canonical_layout(out))
}

fn heap_mul_ctx<C: MonCtx>(
    base: &Ring,
    ctx: &C,
    sm: &[C::M],
    sc: &[Elem],
    bm: &[C::M],
    bc: &[Elem],
) -> Result<(Vec<C::M>, Vec<Elem>)> {
    let mut heap: BinaryHeap<HeapEntry<C::M>> = BinaryHeap::with_capacity(sm.len());
    for (i, m) in sm.iter().enumerate() {
        heap.push(HeapEntry { mon: ctx.add(m, &bm[0]), small: i as u32, big: 0 });
    }
    let mut mons: Vec<C::M> = Vec::new();
    let mut coeffs: Vec<Elem> = Vec::new();
    let mut t = zero(base);
    while let Some(top) = heap.pop() {
        let mon = top.mon.clone();
        let mut acc = sc[top.small as usize].mul(&bc[top.big as usize])?;
        if (top.big as usize) + 1 < bm.len() {
            heap.push(HeapEntry {
                mon: ctx.add(&sm[top.small as usize], &bm[top.big as usize + 1]),
                small: top.small,
                big: top.big + 1,
            });
        }
        while let Some(peek) = heap.peek() {
            if peek.mon != mon {
                break;
            }
            let e = heap.pop().unwrap();
            t.mul_into(&sc[e.small as usize], &bc[e.big as usize])?;
            acc.add_assign_elem(&t)?;
            if (e.big as usize) + 1 < bm.len() {
                heap.push(HeapEntry {
                    mon: ctx.add(&sm[e.small as usize], &bm[e.big as usize + 1]),
                    small: e.small,
                    big: e.big + 1,
                });
            }
        }
        if !acc.is_zero() {
            mons.push(mon);
            coeffs.push(acc);
        }
    }
    Ok((mons, coeffs))
}

/// Quadratic schoolbook product; the independent oracle for `heap_mul`.
pub fn naive_mul(ring: &Ring, a: &Elem, b: &Elem) -> Result<Elem> {
    let (ta, tb) = match (&a.repr, &b.repr) {
        (Repr::Sparse(x), Repr::Sparse(y)) => (x, y),
        _ => return Err(Error::InvalidParameter("naive_mul requires sparse operands".into())),
    };
    let mut pairs = Vec::with_capacity(ta.len() * tb.len());
    for i in 0..ta.len() {
        let ea = ta.term_exps(i);
        for j in 0..tb.len() {
            let eb = tb.term_exps(j);
            let exps: Vec<u32> = ea.iter().zip(eb.iter()).map(|(x, y)| x + y).collect();
            pairs.push((ta.coeffs[i].mul(&tb.coeffs[j])?, exps));
        }
    }
    from_pairs(ring, pairs)
}

// ---------------------------------------------------------------------------
// Heap division
// ---------------------------------------------------------------------------

enum DivSource {
    Dividend(u32),
    /// Product of quotient term `q` with divisor term `g` (g >= 1).
    Product(u32, u32),
}

struct DivEntry<M: Ord> {
    mon: M,
    src: DivSource,
}

impl<M: Ord> PartialEq for DivEntry<M> {
    fn eq(&self, other: &Self) -> bool {
        self.mon == other.mon
    }
}
impl<M: Ord> Eq for DivEntry<M> {}
impl<M: Ord> PartialOrd for DivEntry<M> {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl<M: Ord> Ord for DivEntry<M> {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        self.mon.cmp(&other.mon)
    }
}

enum LeadDiv {
    Inverse(Elem),
    Exact(Elem),
}

fn heap_div_ctx<C: MonCtx>(
    base: &Ring,
    ctx: &C,
    fm: &[C::M],
    fc: &[Elem],
    gm: &[C::M],
    gc: &[Elem],
    lead: &LeadDiv,
    exact: bool,
) -> Result<(Vec<C::M>, Vec<Elem>, Vec<C::M>, Vec<Elem>)> {
    let mut heap: BinaryHeap<DivEntry<C::M>> = BinaryHeap::new();
    if !fm.is_empty() {
        heap.push(DivEntry { mon: fm[0].clone(), src: DivSource::Dividend(0) });
    }
    let mut qm: Vec<C::M> = Vec::new();
    let mut qc: Vec<Elem> = Vec::new();
    let mut rm: Vec<C::M> = Vec::new();
    let mut rc: Vec<Elem> = Vec::new();
    let mut t = zero(base);
    while let Some(top) = heap.pop() {
        let mon = top.mon.clone();
        let mut acc = zero(base);
        let feed = |heap: &mut BinaryHeap<DivEntry<C::M>>,
                        acc: &mut Elem,
                        t: &mut Elem,
                        e: DivEntry<C::M>|
         -> Result<()> {
            match e.src {
                DivSource::Dividend(i) => {
                    acc.add_assign_elem(&fc[i as usize])?;
                    if (i as usize) + 1 < fm.len() {
                        heap.push(DivEntry {
                            mon: fm[i as usize + 1].clone(),
                            src: DivSource::Dividend(i + 1),
                        });
                    }
                }
                DivSource::Product(q, g) => {
                    t.mul_into(&qc[q as usize], &gc[g as usize])?;
                    *acc = acc.sub(t)?;
                    if (g as usize) + 1 < gm.len() {
                        heap.push(DivEntry {
                            mon: ctx.add(&qm[q as usize], &gm[g as usize + 1]),
                            src: DivSource::Product(q, g + 1),
                        });
                    }
                }
            }
            Ok(())
        };
        feed(&mut heap, &mut acc, &mut t, top)?;
        while let Some(peek) = heap.peek() {
            if peek.mon != mon {
                break;
            }
            let e = heap.pop().unwrap();
            feed(&mut heap, &mut acc, &mut t, e)?;
        }
        if acc.is_zero() {
            continue;
        }
        match ctx.try_sub(&mon, &gm[0]) {
            Some(qmon) => {
                let qcoeff = match lead {
                    LeadDiv::Inverse(inv) => acc.mul(inv)?,
                    LeadDiv::Exact(lc) => acc.exact_div(lc)?,
                };
                if gm.len() > 1 {
                    heap.push(DivEntry {
                        mon: ctx.add(&qmon, &gm[1]),
                        src: DivSource::Product(qm.len() as u32, 1),
                    });
                }
                qm.push(qmon);
                qc.push(qcoeff);
            }
            None => {
                if exact {
                    return Err(Error::InexactDivision);
                }
                rm.push(mon);
                rc.push(acc);
            }
        }
    }
    Ok((qm, qc, rm, rc))
}

fn run_heap_div(
    base: &Ring,
    a: &SparseTerms,
    b: &SparseTerms,
    lead_exact: bool,
    exact: bool,
) -> Result<(SparseTerms, SparseTerms)> {
    assert!(!b.is_empty());
    let cap = a.max_total_deg().max(b.max_total_deg());
    let (a, b, bits) = unify(a, b, cap);
    let lead = if lead_exact {
        LeadDiv::Exact(b.coeffs[0].clone())
    } else {
        LeadDiv::Inverse(b.coeffs[0].try_inverse()?)
    };
    let (q, r) = match bits {
        Some(bits) => {
            let ctx = PackedCtx { nvars: a.nvars, bits };
            let (qm, qc, rm, rc) =
                heap_div_ctx(base, &ctx, &a.packed, &a.coeffs, &b.packed, &b.coeffs, &lead, exact)?;
            (
                SparseTerms { nvars: a.nvars, bits, coeffs: qc, packed: qm, wide: Vec::new() },
                SparseTerms { nvars: a.nvars, bits, coeffs: rc, packed: rm, wide: Vec::new() },
            )
        }
        None => {
            let ctx = WideCtx { nvars: a.nvars };
            let am = wide_rows(&a);
            let bm = wide_rows(&b);
            let (qm, qc, rm, rc) =
                heap_div_ctx(base, &ctx, &am, &a.coeffs, &bm, &b.coeffs, &lead, exact)?;
            (flatten_wide(a.nvars, qm, qc), flatten_wide(a.nvars, rm, rc))
        }
    };
    Ok((canonical_layout(q), canonical_layout(r)))
}

/// Division with remainder: f = q*g + r with no term of r divisible by the
/// leading monomial of g. Requires lc(g) invertible.
pub fn heap_divrem(f: &Elem, g: &Elem) -> Result<(Elem, Elem)> {
    if !rings_equal(&f.ring, &g.ring) {
        return Err(Error::MixedParents);
    }
    let (tf, tg) = sparse_parts(f, g)?;
    if tg.is_empty() {
        return Err(Error::DivisionByZero);
    }
    let base = base_ring(&f.ring).unwrap().clone();
    let (q, r) = run_heap_div(&base, tf, tg, false, false)?;
    Ok((
        Elem { ring: f.ring.clone(), repr: Repr::Sparse(q) },
        Elem { ring: f.ring.clone(), repr: Repr::Sparse(r) },
    ))
}

/// Exact division: errors with `InexactDivision` when g does not divide f.
pub fn heap_exact_div(f: &Elem, g: &Elem) -> Result<Elem> {
    if !rings_equal(&f.ring, &g.ring) {
        return Err(Error::MixedParents);
    }
    let (tf, tg) = sparse_parts(f, g)?;
    if tg.is_empty() {
        return Err(Error::DivisionByZero);
    }
    let base = base_ring(&f.ring).unwrap().clone();
    let (q, _r) = run_heap_div(&base, tf, tg, true, true)?;
    Ok(Elem { ring: f.ring.clone(), repr: Repr::Sparse(q) })
}

fn sparse_parts<'a>(f: &'a Elem, g: &'a Elem) -> Result<(&'a SparseTerms, &'a SparseTerms)> {
    match (&f.repr, &g.repr) {
        (Repr::Sparse(a), Repr::Sparse(b)) => Ok((a, b)),
        _ => Err(Error::InvalidParameter("sparse operands expected".into())),
    }
}

// ---------------------------------------------------------------------------
// Powering
// ---------------------------------------------------------------------------

/// Threshold for the multinomial-formula path: few terms, nontrivial power.
const MULTINOMIAL_MAX_TERMS: usize = 5;
const MULTINOMIAL_MIN_POW: u64 = 4;

pub fn pow_dispatch(f: &Elem, k: u64) -> Result<Elem> {
    let t = match &f.repr {
        Repr::Sparse(t) => t,
        _ => unreachable!(),
    };
    if k == 0 {
        return Ok(one(&f.ring));
    }
    if k == 1 {
        return Ok(f.clone());
    }
    if t.len() <= MULTINOMIAL_MAX_TERMS && k >= MULTINOMIAL_MIN_POW {
        multinomial_pow(f, k)
    } else {
        heap_pow(f, k)
    }
}

/// Powering by a chain of heap products. For sparse inputs the chain
/// f, f^2, ..., f^k beats binary squaring because the largest factor is
/// always multiplied by the small f.
pub fn heap_pow(f: &Elem, k: u64) -> Result<Elem> {
    if k == 0 {
        return Ok(one(&f.ring));
    }
    let base = base_ring(&f.ring).unwrap().clone();
    let tf = match &f.repr {
        Repr::Sparse(t) => t,
        _ => unreachable!(),
    };
    let mut acc = tf.clone();
    for _ in 1..k {
        acc = heap_mul(&base, &acc, tf)?;
    }
    Ok(Elem { ring: f.ring.clone(), repr: Repr::Sparse(acc) })
}

/// Powering by the multinomial formula: enumerate all exponent
/// compositions of k over the terms.
pub fn multinomial_pow(f: &Elem, k: u64) -> Result<Elem> {
    let tf = match &f.repr {
        Repr::Sparse(t) => t,
        _ => unreachable!(),
    };
    if k == 0 {
        return Ok(one(&f.ring));
    }
    if tf.is_empty() {
        return Ok(crate::ring::zero(&f.ring));
    }
    let base = base_ring(&f.ring).unwrap().clone();
    let nterms = tf.len();
    let nvars = tf.nvars;
    // coefficient powers per term, precomputed up to k
    let mut coeff_pows: Vec<Vec<Elem>> = Vec::with_capacity(nterms);
    for c in &tf.coeffs {
        let mut pows = Vec::with_capacity(k as usize + 1);
        pows.push(one(&base));
        for i in 1..=k {
            let prev = &pows[i as usize - 1];
            pows.push(prev.mul(c)?);
        }
        coeff_pows.push(pows);
    }
    let exps: Vec<Vec<u32>> = (0..nterms).map(|i| tf.term_exps(i)).collect();
    let mut pairs: Vec<(Elem, Vec<u32>)> = Vec::new();
    let mut exp = vec![0u32; nvars];
    // depth-first over compositions k = k_0 + ... + k_{t-1}; `multinom`
    // carries the product of binomials C(rem, take) chosen so far and
    // `running` the product of earlier term coefficient powers.
    fn recurse_full(
        term: usize,
        remaining: u64,
        multinom: &BigInt,
        running: &Elem,
        exp: &mut Vec<u32>,
        base: &Ring,
        coeff_pows: &[Vec<Elem>],
        exps: &[Vec<u32>],
        pairs: &mut Vec<(Elem, Vec<u32>)>,
    ) -> Result<()> {
        if term == coeff_pows.len() - 1 {
            let mut c = coerce_int(base, multinom)?;
            c = c.mul(running)?;
            c = c.mul(&coeff_pows[term][remaining as usize])?;
            let mut e = exp.clone();
            for (j, x) in exps[term].iter().enumerate() {
                e[j] += x * remaining as u32;
            }
            pairs.push((c, e));
            return Ok(());
        }
        let mut binom = BigInt::from(1u32);
        for take in 0..=remaining {
            let m = multinom * &binom;
            let r = running.mul(&coeff_pows[term][take as usize])?;
            let saved = exp.clone();
            for (j, x) in exps[term].iter().enumerate() {
                exp[j] += x * take as u32;
            }
            recurse_full(
                term + 1,
                remaining - take,
                &m,
                &r,
                exp,
                base,
                coeff_pows,
                exps,
                pairs,
            )?;
            *exp = saved;
            if take < remaining {
                binom = binom * BigInt::from(remaining - take) / BigInt::from(take + 1);
            }
        }
        Ok(())
    }
    recurse_full(
        0,
        k,
        &BigInt::from(1u32),
        &one(&base),
        &mut exp,
        &base,
        &coeff_pows,
        &exps,
        &mut pairs,
    )?;
    from_pairs(&f.ring, pairs)
}

// ---------------------------------------------------------------------------
// Accessors used across modules
// ---------------------------------------------------------------------------

pub fn sparse_terms(x: &Elem) -> &SparseTerms {
    match &x.repr {
        Repr::Sparse(t) => t,
        _ => panic!("not a sparse polynomial"),
    }
}

/// Number of variables of a multivariate ring.
pub fn num_vars(ring: &Ring) -> usize {
    match &ring.kind {
        RingKind::MultiPolyRing { vars, .. } => vars.len(),
        _ => panic!("not a multivariate ring"),
    }
}

/// Debug validator: strictly sorted descending, nonzero coefficients.
pub fn validate(t: &SparseTerms) -> bool {
    if t.coeffs.iter().any(Elem::is_zero) {
        return false;
    }
    if t.bits > 0 {
        t.packed.windows(2).all(|w| w[0] > w[1])
    } else {
        let s = t.nvars + 1;
        (1..t.len()).all(|i| t.wide[(i - 1) * s..i * s] > t.wide[i * s..(i + 1) * s])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{coerce_i64, integers, multi_poly_ring, rationals};
    use crate::rng::SplitMix64;

    fn ring3() -> Ring {
        multi_poly_ring(integers(), &["x", "y", "z"])
    }

    fn rand_sparse(ring: &Ring, rng: &mut SplitMix64, terms: usize, maxdeg: u32) -> Elem {
        let nv = num_vars(ring);
        let base = crate::ring::base_ring(ring).unwrap().clone();
        let mut pairs = Vec::new();
        for _ in 0..terms {
            let c = coerce_i64(&base, rng.range_i64(-30, 30)).unwrap();
            let exps: Vec<u32> = (0..nv).map(|_| rng.below(maxdeg as u64 + 1) as u32).collect();
            pairs.push((c, exps));
        }
        from_pairs(ring, pairs).unwrap()
    }

    #[test]
    fn heap_mul_matches_naive() {
        let ring = ring3();
        let mut rng = SplitMix64::new(11);
        for _ in 0..25 {
            let a = rand_sparse(&ring, &mut rng, 6, 5);
            let b = rand_sparse(&ring, &mut rng, 6, 5);
            let fast = a.mul(&b).unwrap();
            let slow = naive_mul(&ring, &a, &b).unwrap();
            assert_eq!(fast, slow);
            assert!(validate(sparse_terms(&fast)));
        }
    }

    #[test]
    fn wide_layout_matches_naive() {
        // 9 variables at degree 40 cannot pack into u64 fields
        let vars: Vec<&str> = alloc::vec!["a", "b", "c", "d", "e", "f", "g", "h", "i"];
        let ring = multi_poly_ring(integers(), &vars);
        let mut rng = SplitMix64::new(12);
        let a = rand_sparse(&ring, &mut rng, 8, 40);
        let b = rand_sparse(&ring, &mut rng, 8, 40);
        assert!(sparse_terms(&a).bits == 0, "expected the wide layout");
        let fast = a.mul(&b).unwrap();
        let slow = naive_mul(&ring, &a, &b).unwrap();
        assert_eq!(fast, slow);
        assert!(validate(sparse_terms(&fast)));
    }

    #[test]
    fn layout_canonicalization_is_semantic() {
        // same polynomial built with different term orders compares equal
        let ring = ring3();
        let base = integers();
        let c = |v: i64| coerce_i64(&base, v).unwrap();
        let p1 = from_pairs(
            &ring,
            alloc::vec![(c(2), alloc::vec![1, 0, 0]), (c(3), alloc::vec![0, 2, 1])],
        )
        .unwrap();
        let p2 = from_pairs(
            &ring,
            alloc::vec![
                (c(3), alloc::vec![0, 2, 1]),
                (c(1), alloc::vec![1, 0, 0]),
                (c(1), alloc::vec![1, 0, 0]),
            ],
        )
        .unwrap();
        assert_eq!(p1, p2);
    }

    #[test]
    fn pow_paths_agree() {
        let ring = ring3();
        let mut rng = SplitMix64::new(13);
        for terms in [2usize, 3, 5] {
            let f = rand_sparse(&ring, &mut rng, terms, 3);
            if sparse_terms(&f).is_zero() {
                continue;
            }
            for k in [4u64, 6] {
                let a = multinomial_pow(&f, k).unwrap();
                let b = heap_pow(&f, k).unwrap();
                let d = pow_dispatch(&f, k).unwrap();
                assert_eq!(a, b);
                assert_eq!(a, d);
                assert!(validate(sparse_terms(&a)));
            }
        }
    }

    #[test]
    fn pow_small_exponents() {
        let ring = ring3();
        let mut rng = SplitMix64::new(14);
        let f = rand_sparse(&ring, &mut rng, 4, 3);
        let one = coerce_i64(&ring, 1).unwrap();
        assert_eq!(pow_dispatch(&f, 0).unwrap(), one);
        assert_eq!(pow_dispatch(&f, 1).unwrap(), f);
        assert_eq!(pow_dispatch(&f, 2).unwrap(), f.mul(&f).unwrap());
    }

    #[test]
    fn exact_division_roundtrip() {
        let ring = ring3();
        let mut rng = SplitMix64::new(15);
        for _ in 0..20 {
            let f = rand_sparse(&ring, &mut rng, 5, 4);
            let g = rand_sparse(&ring, &mut rng, 4, 4);
            if sparse_terms(&g).is_zero() {
                continue;
            }
            let prod = f.mul(&g).unwrap();
            let q = heap_exact_div(&prod, &g).unwrap();
            assert_eq!(q, f);
        }
    }

    #[test]
    fn inexact_division_detected() {
        let ring = ring3();
        let base = integers();
        let c = |v: i64| coerce_i64(&base, v).unwrap();
        // x + 1 does not divide x*y + 2
        let f = from_pairs(
            &ring,
            alloc::vec![(c(1), alloc::vec![1, 1, 0]), (c(2), alloc::vec![0, 0, 0])],
        )
        .unwrap();
        let g = from_pairs(
            &ring,
            alloc::vec![(c(1), alloc::vec![1, 0, 0]), (c(1), alloc::vec![0, 0, 0])],
        )
        .unwrap();
        assert!(heap_exact_div(&f, &g).is_err());
    }

    #[test]
    fn divrem_contract_over_field_base() {
        let ring = multi_poly_ring(rationals(), &["x", "y"]);
        let base = rationals();
        let c = |v: i64| coerce_i64(&base, v).unwrap();
        let f = from_pairs(
            &ring,
            alloc::vec![
                (c(1), alloc::vec![3, 1]),
                (c(2), alloc::vec![1, 2]),
                (c(5), alloc::vec![0, 0]),
            ],
        )
        .unwrap();
        let g = from_pairs(
            &ring,
            alloc::vec![(c(2), alloc::vec![1, 1]), (c(1), alloc::vec![0, 0])],
        )
        .unwrap();
        let (q, r) = heap_divrem(&f, &g).unwrap();
        let back = q.mul(&g).unwrap().add(&r).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn packing_roundtrip() {
        for bits in BITS_MENU {
            let exps = alloc::vec![3u32, 0, (1 << (bits - 1)) - 1];
            if choose_bits(3, exps.iter().map(|&e| e as u64).sum()) < Some(bits) {
                continue;
            }
            let key = pack_key(bits, 3, &exps);
            assert_eq!(unpack_key(bits, 3, key), exps);
        }
    }

    #[test]
    fn grlex_order_from_packed_compare() {
        // total degree dominates; ties broken lexicographically by variable
        let ring = ring3();
        let base = integers();
        let c = |v: i64| coerce_i64(&base, v).unwrap();
        let p = from_pairs(
            &ring,
            alloc::vec![
                (c(1), alloc::vec![0, 0, 1]),
                (c(1), alloc::vec![2, 0, 0]),
                (c(1), alloc::vec![0, 1, 0]),
                (c(1), alloc::vec![1, 1, 1]),
            ],
        )
        .unwrap();
        let t = sparse_terms(&p);
        let degs: Vec<u64> = (0..t.len()).map(|i| t.term_total_deg(i)).collect();
        assert_eq!(degs, alloc::vec![3, 2, 1, 1]);
        assert_eq!(t.term_exps(1), alloc::vec![2, 0, 0]);
        assert_eq!(t.term_exps(2), alloc::vec![0, 1, 0]);
    }
}
