//! JSON exchange format for matrices: entries in canonical text form plus a
//! human-readable description of the base ring, so files round-trip through
//! the expression parser.

use algebra_core::matrix::DenseMatrix;
use algebra_core::ring::{base_ring, Ring, RingKind};
use algebra_core::text::{format_elem, parse_in};

use crate::report::CliError;

pub fn ring_name(r: &Ring) -> String {
    match &r.kind {
        RingKind::Integers => "ZZ".to_string(),
        RingKind::Rationals => "QQ".to_string(),
        RingKind::IntegerResidue { modulus } => format!("ZZ/{modulus}"),
        RingKind::PolynomialRing { var, .. } => {
            format!("{}[{var}]", ring_name(base_ring(r).unwrap()))
        }
        RingKind::MultiPolyRing { vars, .. } => {
            format!("{}[{}]", ring_name(base_ring(r).unwrap()), vars.join(","))
        }
        RingKind::ResidueRing { modulus, .. } => {
            format!("{}/({})", ring_name(base_ring(r).unwrap()), format_elem(modulus))
        }
        RingKind::FractionField { base } => format!("Frac({})", ring_name(base)),
        RingKind::FiniteField { p, k, var, .. } => format!("GF({p}^{k},{var})"),
        RingKind::NumberField(nf) => {
            let f = algebra_core::ring::Elem {
                ring: algebra_core::ring::polynomial_ring(
                    algebra_core::ring::rationals(),
                    &nf.var,
                ),
                repr: algebra_core::ring::Repr::Dense(nf.f.clone()),
            };
            format!("QQ[{}]/({})", nf.var, format_elem(&f))
        }
        RingKind::MatrixSpace { rows, cols, .. } => {
            format!("Mat({}x{},{})", rows, cols, ring_name(base_ring(r).unwrap()))
        }
    }
}

pub fn matrix_to_json(m: &DenseMatrix) -> serde_json::Value {
    let rows: Vec<Vec<String>> = (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| format_elem(m.at(i, j))).collect())
        .collect();
    serde_json::json!({ "ring": ring_name(m.base()), "rows": rows })
}

/// Parse a matrix back from the JSON form. The target ring is supplied by
/// the caller; the stored ring string is informational.
pub fn matrix_from_json(
    base: &Ring,
    v: &serde_json::Value,
) -> Result<DenseMatrix, CliError> {
    let rows = v["rows"]
        .as_array()
        .ok_or_else(|| CliError::Failure("matrix json: missing rows".into()))?;
    let mut out = Vec::with_capacity(rows.len());
    for row in rows {
        let row = row
            .as_array()
            .ok_or_else(|| CliError::Failure("matrix json: row is not an array".into()))?;
        let mut entries = Vec::with_capacity(row.len());
        for cell in row {
            let s = cell
                .as_str()
                .ok_or_else(|| CliError::Failure("matrix json: entry is not a string".into()))?;
            entries.push(parse_in(base, s)?);
        }
        out.push(entries);
    }
    Ok(DenseMatrix::from_rows(base, out)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use algebra_core::ring::{coerce_i64, integers};

    #[test]
    fn matrix_roundtrip() {
        let zz = integers();
        let rows = vec![
            vec![coerce_i64(&zz, 1).unwrap(), coerce_i64(&zz, -2).unwrap()],
            vec![coerce_i64(&zz, 3).unwrap(), coerce_i64(&zz, 0).unwrap()],
        ];
        let m = DenseMatrix::from_rows(&zz, rows).unwrap();
        let j = matrix_to_json(&m);
        assert_eq!(j["ring"], "ZZ");
        let back = matrix_from_json(&zz, &j).unwrap();
        for i in 0..2 {
            for k in 0..2 {
                assert_eq!(m.at(i, k), back.at(i, k));
            }
        }
    }

    #[test]
    fn ring_names() {
        use algebra_core::ring::{multi_poly_ring, polynomial_ring, rationals};
        let qq = rationals();
        assert_eq!(ring_name(&qq), "QQ");
        let px = polynomial_ring(qq.clone(), "x");
        assert_eq!(ring_name(&px), "QQ[x]");
        let mv = multi_poly_ring(integers(), &["x", "y"]);
        assert_eq!(ring_name(&mv), "ZZ[x,y]");
    }
}
