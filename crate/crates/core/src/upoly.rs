//! Dense univariate polynomials over Q and exact column reductions over the
//! principal ideal domain k[x]: kernel and image of a polynomial matrix,
//! span membership with coordinates, and a diagonal form whose entries
//! decide whether a cokernel has torsion.
//!
//! Matrices are stored column-major as `Vec<Vec<UPoly>>` with a fixed row
//! count; all reductions are fraction-free in the sense that they only ever
//! divide by leading coefficients, so every result is exact.

use crate::error::{Error, Result};
use crate::hopf::{Kernel, Mono};
use crate::hopf::HopfElement;
use crate::scalar::Rat;
use num_traits::{One, Zero};

/// Little-endian coefficient list without trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct UPoly {
    coeffs: Vec<Rat>,
}

impl UPoly {
    pub fn zero() -> Self {
        UPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        UPoly::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        UPoly::from_coeffs(vec![c])
    }

    pub fn monomial(k: usize, c: Rat) -> Self {
        let mut coeffs = vec![Rat::zero(); k + 1];
        coeffs[k] = c;
        UPoly::from_coeffs(coeffs)
    }

    pub fn from_coeffs(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UPoly { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or None for the zero polynomial.
    pub fn deg(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Units of k[x] are the nonzero constants.
    pub fn is_unit(&self) -> bool {
        self.deg() == Some(0)
    }

    /// The constant this polynomial equals, if it is one (zero included).
    pub fn constant_value(&self) -> Option<Rat> {
        match self.coeffs.len() {
            0 => Some(Rat::zero()),
            1 => Some(self.coeffs[0].clone()),
            _ => None,
        }
    }

    pub fn coeff(&self, k: usize) -> Rat {
        self.coeffs.get(k).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn lead(&self) -> Option<&Rat> {
        self.coeffs.last()
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        UPoly::from_coeffs((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        UPoly::from_coeffs((0..n).map(|k| self.coeff(k) - other.coeff(k)).collect())
    }

    pub fn neg(&self) -> Self {
        UPoly::from_coeffs(self.coeffs.iter().map(|c| -c.clone()).collect())
    }

    pub fn scale(&self, c: &Rat) -> Self {
        UPoly::from_coeffs(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return UPoly::zero();
        }
        let mut coeffs = vec![Rat::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        UPoly::from_coeffs(coeffs)
    }

    /// Long division: (quotient, remainder) with deg r < deg d.
    pub fn divmod(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let dd = d.deg().unwrap();
        let lead = d.lead().unwrap().clone();
        let mut r = self.clone();
        let mut q = UPoly::zero();
        while let Some(rd) = r.deg() {
            if rd < dd {
                break;
            }
            let c = r.lead().unwrap() / &lead;
            let step = UPoly::monomial(rd - dd, c);
            q = q.add(&step);
            r = r.sub(&step.mul(d));
        }
        (q, r)
    }

    /// Reads a 1-variable polynomial-kernel element as a polynomial.
    pub fn from_hopf(h: &HopfElement) -> Result<Self> {
        if h.kernel() != &(Kernel::Polynomial { vars: 1 }) {
            return Err(Error::Unsupported(
                "polynomial-matrix reductions need the one-variable polynomial kernel".into(),
            ));
        }
        let mut coeffs = Vec::new();
        for (m, c) in h.terms() {
            let k = m[0] as usize;
            if coeffs.len() <= k {
                coeffs.resize(k + 1, Rat::zero());
            }
            coeffs[k] = c.clone();
        }
        Ok(UPoly::from_coeffs(coeffs))
    }

    pub fn to_hopf(&self, kernel: &Kernel) -> HopfElement {
        let mut h = HopfElement::zero(kernel);
        for (k, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                let m: Mono = vec![k as u64];
                h.add_term(m, c.clone());
            }
        }
        h
    }
}

fn col_pivot(col: &[UPoly]) -> Option<usize> {
    col.iter().position(|e| !e.is_zero())
}

fn col_axpy(dst: &mut [UPoly], src: &[UPoly], q: &UPoly) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d = d.sub(&q.mul(s));
    }
}

fn col_scale(col: &mut [UPoly], c: &Rat) {
    for e in col.iter_mut() {
        *e = e.scale(c);
    }
}

/// Column-reduces `cols` over k[x]. Returns the kernel of the matrix (as
/// coordinate vectors of width `cols.len()`) and a column-echelon basis of
/// the image: strictly increasing pivot rows, each pivot entry monic, and
/// zeros above every pivot.
pub fn kernel_and_image(
    rows: usize,
    cols: &[Vec<UPoly>],
) -> (Vec<Vec<UPoly>>, Vec<Vec<UPoly>>) {
    let n = cols.len();
    let mut work: Vec<Vec<UPoly>> = cols.to_vec();
    let mut t: Vec<Vec<UPoly>> = (0..n)
        .map(|j| {
            let mut e = vec![UPoly::zero(); n];
            e[j] = UPoly::one();
            e
        })
        .collect();
    let mut live: Vec<usize> = (0..n).collect();
    let mut image = Vec::new();

    for row in 0..rows {
        // Entering this row, every live column is zero above it.
        loop {
            let mut at_row: Vec<usize> = live
                .iter()
                .copied()
                .filter(|&j| !work[j][row].is_zero())
                .collect();
            if at_row.len() <= 1 {
                if let Some(&j) = at_row.first() {
                    let inv = Rat::one() / work[j][row].lead().unwrap().clone();
                    col_scale(&mut work[j], &inv);
                    col_scale(&mut t[j], &inv);
                    image.push(work[j].clone());
                    live.retain(|&x| x != j);
                }
                break;
            }
            // Reduce everything by the minimum-degree entry at this row; the
            // total degree strictly drops, so this terminates.
            at_row.sort_by_key(|&j| work[j][row].deg().unwrap());
            let b = at_row[0];
            for &c in &at_row[1..] {
                let (q, _) = work[c][row].divmod(&work[b][row]);
                let src = work[b].clone();
                col_axpy(&mut work[c], &src, &q);
                let tsrc = t[b].clone();
                col_axpy(&mut t[c], &tsrc, &q);
            }
        }
    }

    let kernel = live
        .into_iter()
        .filter(|&j| col_pivot(&work[j]).is_none())
        .map(|j| t[j].clone())
        .collect();
    (kernel, image)
}

/// Column-echelon basis of the span of `cols`.
pub fn col_echelon(rows: usize, cols: &[Vec<UPoly>]) -> Vec<Vec<UPoly>> {
    kernel_and_image(rows, cols).1
}

/// Coordinates of `v` in an echelon basis, or None when `v` escapes the
/// span. Pivots increase, so a single front-to-back pass decides both.
pub fn reduce_coords(echelon: &[Vec<UPoly>], v: &[UPoly]) -> Option<Vec<UPoly>> {
    let mut coords = vec![UPoly::zero(); echelon.len()];
    let mut r = v.to_vec();
    for (j, col) in echelon.iter().enumerate() {
        let p = col_pivot(col).expect("echelon basis has no zero columns");
        if r[p].is_zero() {
            continue;
        }
        let (q, rem) = r[p].divmod(&col[p]);
        if !rem.is_zero() {
            return None;
        }
        col_axpy(&mut r, col, &q);
        coords[j] = q;
    }
    if r.iter().all(UPoly::is_zero) {
        Some(coords)
    } else {
        None
    }
}

/// Diagonal entries of a matrix diagonalized by row and column operations
/// over k[x]. The entries come in no particular divisibility order, but the
/// cokernel of the input has torsion exactly when some entry is a nonzero
/// nonunit, which is all the callers ask.
pub fn diagonal_divisors(rows: usize, cols: &[Vec<UPoly>]) -> Vec<UPoly> {
    let mut work: Vec<Vec<UPoly>> = cols.iter().filter(|c| col_pivot(c).is_some()).cloned().collect();
    let mut live_rows: Vec<usize> = (0..rows).collect();
    let mut divisors = Vec::new();

    while !work.is_empty() && !live_rows.is_empty() {
        // Find the minimum-degree nonzero entry in the live submatrix.
        let mut best: Option<(usize, usize, usize)> = None;
        for (ci, col) in work.iter().enumerate() {
            for (ri, &r) in live_rows.iter().enumerate() {
                if let Some(d) = col[r].deg() {
                    if best.map_or(true, |(_, _, bd)| d < bd) {
                        best = Some((ci, ri, d));
                    }
                }
            }
        }
        let Some((ci, ri, _)) = best else { break };
        work.swap(0, ci);
        live_rows.swap(0, ri);
        let r0 = live_rows[0];

        // Clear row r0 across columns and column 0 across rows; remainders
        // shrink the minimum degree, so reiterate until both are clean.
        let mut clean = true;
        let pivot = work[0][r0].clone();
        for c in 1..work.len() {
            if work[c][r0].is_zero() {
                continue;
            }
            let (q, rem) = work[c][r0].divmod(&pivot);
            let src = work[0].clone();
            col_axpy(&mut work[c], &src, &q);
            if !rem.is_zero() {
                clean = false;
            }
        }
        for &r in &live_rows[1..] {
            if work[0][r].is_zero() {
                continue;
            }
            let (q, rem) = work[0][r].divmod(&pivot);
            // Row operation: row r minus q times row r0, across all columns.
            for col in work.iter_mut() {
                let s = col[r0].clone();
                col[r] = col[r].sub(&q.mul(&s));
            }
            if !rem.is_zero() {
                clean = false;
            }
        }
        if !clean {
            continue;
        }
        divisors.push(pivot);
        work.remove(0);
        live_rows.remove(0);
        work.retain(|c| live_rows.iter().any(|&r| !c[r].is_zero()));
    }
    divisors
}

/// Determinant by cofactor expansion; callers only pass desk-sized blocks.
pub fn det(n: usize, cols: &[Vec<UPoly>]) -> UPoly {
    assert_eq!(cols.len(), n, "determinant needs a square block");
    if n == 0 {
        return UPoly::one();
    }
    if n == 1 {
        return cols[0][0].clone();
    }
    let mut out = UPoly::zero();
    for (j, col) in cols.iter().enumerate() {
        if col[0].is_zero() {
            continue;
        }
        let minor: Vec<Vec<UPoly>> = cols
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != j)
            .map(|(_, c)| c[1..].to_vec())
            .collect();
        let term = col[0].mul(&det(n - 1, &minor));
        out = if j % 2 == 0 { out.add(&term) } else { out.sub(&term) };
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn xp(coeffs: &[i64]) -> UPoly {
        UPoly::from_coeffs(coeffs.iter().map(|&c| rat(c)).collect())
    }

    fn mat_apply(rows: usize, cols: &[Vec<UPoly>], v: &[UPoly]) -> Vec<UPoly> {
        let mut out = vec![UPoly::zero(); rows];
        for (col, c) in cols.iter().zip(v) {
            for (o, e) in out.iter_mut().zip(col) {
                *o = o.add(&c.mul(e));
            }
        }
        out
    }

    #[test]
    fn division_is_exact_long_division() {
        let (q, r) = xp(&[-1, 0, 1]).divmod(&xp(&[-1, 1]));
        assert_eq!(q, xp(&[1, 1]));
        assert!(r.is_zero());
        let (q, r) = xp(&[1, 0, 0, 2]).divmod(&xp(&[0, 1]));
        assert_eq!(q, xp(&[0, 0, 2]));
        assert_eq!(r, xp(&[1]));
    }

    #[test]
    fn kernel_and_image_of_a_rank_one_matrix() {
        // Columns (x, 1) and (x^2, x): the second is x times the first.
        let cols = vec![vec![xp(&[0, 1]), xp(&[1])], vec![xp(&[0, 0, 1]), xp(&[0, 1])]];
        let (kernel, image) = kernel_and_image(2, &cols);
        assert_eq!(kernel.len(), 1);
        let img_of_kernel = mat_apply(2, &cols, &kernel[0]);
        assert!(img_of_kernel.iter().all(UPoly::is_zero));
        assert_eq!(image.len(), 1);
        // Monic pivot at the top row.
        assert_eq!(image[0][0], xp(&[0, 1]));
        assert_eq!(image[0][1], xp(&[1]));
    }

    #[test]
    fn membership_reduction_finds_coordinates_or_refuses() {
        let echelon = vec![vec![xp(&[0, 1]), xp(&[1])]];
        let coords = reduce_coords(&echelon, &[xp(&[0, 0, 1]), xp(&[0, 1])]).unwrap();
        assert_eq!(coords, vec![xp(&[0, 1])]);
        assert!(reduce_coords(&echelon, &[xp(&[1]), xp(&[0])]).is_none());
    }

    #[test]
    fn diagonal_divisors_separate_free_from_torsion() {
        // The column (x, 1) spans a direct summand: one unit divisor.
        let free = vec![vec![xp(&[0, 1]), xp(&[1])]];
        let d = diagonal_divisors(2, &free);
        assert_eq!(d.len(), 1);
        assert!(d[0].is_unit());
        // The 1x1 matrix (x) has cokernel k[x]/(x): a nonunit divisor.
        let torsion = vec![vec![xp(&[0, 1])]];
        let d = diagonal_divisors(1, &torsion);
        assert_eq!(d.len(), 1);
        assert!(!d[0].is_unit() && !d[0].is_zero());
    }

    #[test]
    fn cofactor_determinant_matches_hand_expansion() {
        // det [[x, 1], [2, x]] = x^2 - 2 (columns listed first).
        let cols = vec![vec![xp(&[0, 1]), xp(&[1])], vec![xp(&[2]), xp(&[0, 1])]];
        assert_eq!(det(2, &cols), xp(&[-2, 0, 1]));
    }

    #[test]
    fn hopf_round_trip_preserves_terms() {
        let kernel = Kernel::Polynomial { vars: 1 };
        let p = xp(&[3, 0, -2]);
        let h = p.to_hopf(&kernel);
        assert_eq!(UPoly::from_hopf(&h).unwrap(), p);
        let group = Kernel::Group { orders: vec![2] };
        let g = HopfElement::unit(&group);
        assert!(UPoly::from_hopf(&g).is_err());
    }
}
