//! Zero-forcing receiver built from the estimated channel.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::channel::CMatrix;
use crate::model::SinrParams;
use crate::{Error, Result};

/// `A = Ĝ(Ĝ†Ĝ)⁻¹` together with the diagonal of `(Ĝ†Ĝ)⁻¹`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZfReceiver {
    pub a: CMatrix,
    pub gram_inv_diag: Vec<f64>,
}

/// Per-user instantaneous SINR and the underlying `X = 1/[(Ĝ†Ĝ)⁻¹]_kk`.
#[derive(Debug, Clone, PartialEq)]
pub struct SinrSample {
    pub x: Vec<f64>,
    pub sinr: Vec<f64>,
}

const RANK_TOL: f64 = 1e-13;

fn gram_inverse(g_hat: &CMatrix) -> Result<CMatrix> {
    let gram = g_hat.ad_mul(g_hat);
    let chol = gram.clone().cholesky().ok_or(Error::RankDeficient)?;
    // L_kk² / G_kk is the squared sine between column k and the span of the
    // earlier columns; a vanishing value means a numerically dependent column.
    let l = chol.l_dirty();
    let independent = (0..gram.ncols()).all(|k| l[(k, k)].norm_sqr() > RANK_TOL * gram[(k, k)].re);
    if !independent {
        return Err(Error::RankDeficient);
    }
    let inv = chol.inverse();
    if inv.diagonal().iter().all(|d| d.re > 0.0 && d.re.is_finite()) {
        Ok(inv)
    } else {
        Err(Error::RankDeficient)
    }
}

/// Diagonal of `(Ĝ†Ĝ)⁻¹` without forming the receiver matrix.
pub fn gram_inv_diag(g_hat: &CMatrix) -> Result<Vec<f64>> {
    Ok(gram_inverse(g_hat)?.diagonal().iter().map(|d| d.re).collect())
}

/// Builds the ZF receiver; fails when `Ĝ` is (numerically) rank deficient.
pub fn build_zf(g_hat: &CMatrix) -> Result<ZfReceiver> {
    if g_hat.nrows() < g_hat.ncols() {
        return Err(Error::RankDeficient);
    }
    let inv = gram_inverse(g_hat)?;
    Ok(ZfReceiver {
        a: g_hat * &inv,
        gram_inv_diag: inv.diagonal().iter().map(|d| d.re).collect(),
    })
}

/// Soft symbols `r = A†y`.
pub fn detect(receiver: &ZfReceiver, y: &DVector<Complex64>) -> DVector<Complex64> {
    receiver.a.ad_mul(y)
}

/// `γ_k = X_k/(θ_k + η_k X_k)` for each user, `params[k]` belonging to user `k`.
pub fn instantaneous_sinr(params: &[SinrParams], gram_inv_diag: &[f64]) -> Result<SinrSample> {
    if params.len() != gram_inv_diag.len() {
        return Err(Error::Domain(format!(
            "{} parameter sets for {} users",
            params.len(),
            gram_inv_diag.len()
        )));
    }
    let x: Vec<f64> = gram_inv_diag.iter().map(|d| 1.0 / d).collect();
    let sinr = params.iter().zip(&x).map(|(p, x)| p.sinr_of(*x)).collect();
    Ok(SinrSample { x, sinr })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::complex_normal_matrix;
    use num::{BigInt, BigRational, ToPrimitive, Zero};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    type Exact = num_complex::Complex<BigRational>;

    fn exact_inverse(a: Vec<Vec<Exact>>) -> Vec<Vec<Exact>> {
        let n = a.len();
        let mut aug: Vec<Vec<Exact>> = a
            .into_iter()
            .enumerate()
            .map(|(i, mut row)| {
                row.extend((0..n).map(|j| {
                    let one = if i == j { 1 } else { 0 };
                    Exact::new(BigRational::from_integer(BigInt::from(one)), BigRational::zero())
                }));
                row
            })
            .collect();
        for col in 0..n {
            let pivot = (col..n).find(|r| !aug[*r][col].is_zero()).expect("singular");
            aug.swap(col, pivot);
            let p = aug[col][col].clone();
            for v in aug[col].iter_mut() {
                *v = v.clone() / p.clone();
            }
            for r in 0..n {
                if r != col && !aug[r][col].is_zero() {
                    let f = aug[r][col].clone();
                    let pivot_row = aug[col].clone();
                    for (v, pv) in aug[r].iter_mut().zip(pivot_row) {
                        *v = v.clone() - f.clone() * pv;
                    }
                }
            }
        }
        aug.into_iter().map(|row| row[n..].to_vec()).collect()
    }

    #[test]
    fn matches_exact_rational_inverse() {
        let (m, k) = (14, 10);
        // small integers from a fixed LCG keep the Gram matrix exact
        let mut state = 12345u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) % 7) as i64 - 3
        };
        let ints: Vec<(i64, i64)> = (0..m * k).map(|_| (next(), next())).collect();
        let g = CMatrix::from_fn(m, k, |r, c| {
            let (re, im) = ints[c * m + r];
            Complex64::new(re as f64, im as f64)
        });
        let big = |v: i64| BigRational::from_integer(BigInt::from(v));
        let gram: Vec<Vec<Exact>> = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| {
                        (0..m).fold(Exact::new(big(0), big(0)), |acc, r| {
                            let (ar, ai) = ints[i * m + r];
                            let (br, bi) = ints[j * m + r];
                            acc + Exact::new(big(ar), big(-ai)) * Exact::new(big(br), big(bi))
                        })
                    })
                    .collect()
            })
            .collect();
        let exact = exact_inverse(gram);
        let rx = build_zf(&g).unwrap();
        for i in 0..k {
            let want = exact[i][i].re.to_f64().unwrap();
            assert!(exact[i][i].im.is_zero());
            assert!((rx.gram_inv_diag[i] - want).abs() <= 1e-9 * want);
        }
        let inv = gram_inverse(&g).unwrap();
        for i in 0..k {
            for j in 0..k {
                let want = Complex64::new(exact[i][j].re.to_f64().unwrap(), exact[i][j].im.to_f64().unwrap());
                assert!((inv[(i, j)] - want).norm() <= 1e-9 * exact[i][i].re.to_f64().unwrap());
            }
        }
    }

    #[test]
    fn orthonormal_columns_give_identity_gram() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let q = complex_normal_matrix(12, 4, &mut rng).qr().q();
        let rx = build_zf(&q).unwrap();
        assert!((&rx.a - &q).norm() < 1e-12);
        assert!(rx.gram_inv_diag.iter().all(|d| (d - 1.0).abs() < 1e-12));
    }

    #[test]
    fn zero_forcing_property() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let g = complex_normal_matrix(20, 10, &mut rng);
        let rx = build_zf(&g).unwrap();
        let prod = rx.a.ad_mul(&g);
        assert!((prod - CMatrix::identity(10, 10)).norm() < 1e-9);
        assert!(rx.gram_inv_diag.iter().all(|d| *d > 0.0));
        assert_eq!(gram_inv_diag(&g).unwrap(), rx.gram_inv_diag);
    }

    #[test]
    fn scaling_is_homogeneous() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = complex_normal_matrix(16, 6, &mut rng);
        let c = 3.5;
        let base = gram_inv_diag(&g).unwrap();
        let scaled = gram_inv_diag(&(&g * Complex64::from(c))).unwrap();
        for (b, s) in base.iter().zip(&scaled) {
            assert!((s * c * c / b - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rank_deficiency_is_reported() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut g = complex_normal_matrix(8, 3, &mut rng);
        let c0 = g.column(0).clone_owned();
        g.set_column(2, &(c0 * Complex64::new(2.0, -1.0)));
        assert_eq!(build_zf(&g), Err(Error::RankDeficient));
        assert_eq!(build_zf(&CMatrix::zeros(8, 3)), Err(Error::RankDeficient));
        assert_eq!(build_zf(&complex_normal_matrix(2, 3, &mut rng)), Err(Error::RankDeficient));
    }

    #[test]
    fn detection_is_linear_and_inverts_the_channel() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = complex_normal_matrix(10, 4, &mut rng);
        let rx = build_zf(&g).unwrap();
        let p = 7.0f64;
        let x = DVector::from_fn(4, |i, _| Complex64::new(i as f64 - 1.5, 0.5));
        let y = &g * &x * Complex64::from(p.sqrt());
        assert!((detect(&rx, &y) - &x * Complex64::from(p.sqrt())).norm() < 1e-10);

        let y1 = complex_normal_matrix(10, 1, &mut rng).column(0).clone_owned();
        let y2 = complex_normal_matrix(10, 1, &mut rng).column(0).clone_owned();
        let lhs = detect(&rx, &(&y1 + &y2));
        let rhs = detect(&rx, &y1) + detect(&rx, &y2);
        assert!((lhs - rhs).norm() < 1e-12);
        assert!((detect(&rx, &y1) - rx.a.ad_mul(&y1)).norm() == 0.0);
    }

    #[test]
    fn sinr_formula_and_saturation() {
        let single = SinrParams::from_raw(5, 0.1, 0.0, 1.0, 1.0).unwrap();
        let s = instantaneous_sinr(&[single], &[0.25]).unwrap();
        assert!((s.x[0] - 4.0).abs() < 1e-15);
        assert!((s.sinr[0] - 40.0).abs() < 1e-12);

        let loaded = SinrParams::from_raw(5, 0.3, 0.015, 1.0, 1.0).unwrap();
        let s = instantaneous_sinr(&[loaded], &[1e-12]).unwrap();
        assert!(s.sinr[0] < 1.0 / 0.015);
        assert!((s.sinr[0] * 0.015 - 1.0).abs() < 1e-9);
        assert!(instantaneous_sinr(&[loaded], &[1.0, 2.0]).is_err());
    }
}
