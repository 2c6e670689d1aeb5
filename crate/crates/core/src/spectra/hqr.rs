//! Eigenvalues of a real upper Hessenberg matrix by the Francis double-shift
//! QR iteration, following the EISPACK `hqr` scheme: deflation on negligible
//! subdiagonal entries, implicit double shifts from the trailing 2x2 block,
//! and exceptional shifts after 10 and 30 stagnant iterations.

use num_complex::Complex64;

/// Iterations allowed per deflation before giving up.
const MAX_STAGNANT: usize = 200;

/// Row-major dense square matrix.
struct Square {
    n: usize,
    a: Vec<f64>,
}

impl Square {
    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    #[inline]
    fn at_mut(&mut self, i: usize, j: usize) -> &mut f64 {
        &mut self.a[i * self.n + j]
    }
}

/// Returns all eigenvalues of the Hessenberg matrix `h` (row-major, `n × n`),
/// or `None` if some eigenvalue fails to converge.
pub(crate) fn hessenberg_eigenvalues(n: usize, h: Vec<f64>) -> Option<Vec<Complex64>> {
    debug_assert_eq!(h.len(), n * n);
    let mut h = Square { n, a: h };
    let mut re = vec![0.0; n];
    let mut im = vec![0.0; n];
    if n == 0 {
        return Some(Vec::new());
    }

    let eps = f64::EPSILON;
    let mut norm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            norm += h.at(i, j).abs();
        }
    }

    let mut hi = n as isize - 1;
    let mut exshift = 0.0;
    let mut iter = 0usize;
    let (mut p, mut q, mut r);
    let (mut s, mut z);
    let (mut w, mut x, mut y);

    while hi >= 0 {
        let en = hi as usize;
        // smallest l with a negligible subdiagonal entry at (l, l-1)
        let mut l = en;
        while l > 0 {
            s = h.at(l - 1, l - 1).abs() + h.at(l, l).abs();
            if s == 0.0 {
                s = norm;
            }
            if h.at(l, l - 1).abs() < eps * s {
                break;
            }
            l -= 1;
        }

        if l == en {
            // one real root
            re[en] = h.at(en, en) + exshift;
            im[en] = 0.0;
            hi -= 1;
            iter = 0;
        } else if l + 1 == en {
            // two roots from the trailing 2x2 block
            w = h.at(en, en - 1) * h.at(en - 1, en);
            p = (h.at(en - 1, en - 1) - h.at(en, en)) / 2.0;
            q = p * p + w;
            z = q.abs().sqrt();
            x = h.at(en, en) + exshift;
            if q >= 0.0 {
                z = if p >= 0.0 { p + z } else { p - z };
                re[en - 1] = x + z;
                re[en] = if z != 0.0 { x - w / z } else { x + z };
                im[en - 1] = 0.0;
                im[en] = 0.0;
            } else {
                re[en - 1] = x + p;
                re[en] = x + p;
                im[en - 1] = z;
                im[en] = -z;
            }
            hi -= 2;
            iter = 0;
        } else {
            x = h.at(en, en);
            y = h.at(en - 1, en - 1);
            w = h.at(en, en - 1) * h.at(en - 1, en);

            if iter == 10 {
                exshift += x;
                for i in 0..=en {
                    *h.at_mut(i, i) -= x;
                }
                s = h.at(en, en - 1).abs() + h.at(en - 1, en - 2).abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            if iter == 30 {
                s = (y - x) / 2.0;
                s = s * s + w;
                if s > 0.0 {
                    s = s.sqrt();
                    if y < x {
                        s = -s;
                    }
                    s = x - w / ((y - x) / 2.0 + s);
                    for i in 0..=en {
                        *h.at_mut(i, i) -= s;
                    }
                    exshift += s;
                    x = 0.964;
                    y = x;
                    w = x;
                }
            }
            iter += 1;
            if iter > MAX_STAGNANT {
                return None;
            }

            // look for two consecutive small subdiagonal entries
            let mut m = en - 2;
            loop {
                z = h.at(m, m);
                r = x - z;
                s = y - z;
                p = (r * s - w) / h.at(m + 1, m) + h.at(m, m + 1);
                q = h.at(m + 1, m + 1) - z - r - s;
                r = h.at(m + 2, m + 1);
                s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let lhs = h.at(m, m - 1).abs() * (q.abs() + r.abs());
                let rhs = eps * (p.abs() * (h.at(m - 1, m - 1).abs() + z.abs() + h.at(m + 1, m + 1).abs()));
                if lhs < rhs {
                    break;
                }
                m -= 1;
            }

            for i in m + 2..=en {
                *h.at_mut(i, i - 2) = 0.0;
                if i > m + 2 {
                    *h.at_mut(i, i - 3) = 0.0;
                }
            }

            // double QR step on rows l..=en and columns m..=en
            for k in m..en {
                let notlast = k != en - 1;
                if k != m {
                    p = h.at(k, k - 1);
                    q = h.at(k + 1, k - 1);
                    r = if notlast { h.at(k + 2, k - 1) } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x == 0.0 {
                        continue;
                    }
                    p /= x;
                    q /= x;
                    r /= x;
                }
                s = (p * p + q * q + r * r).sqrt();
                if p < 0.0 {
                    s = -s;
                }
                if s != 0.0 {
                    if k != m {
                        *h.at_mut(k, k - 1) = -s * x;
                    } else if l != m {
                        *h.at_mut(k, k - 1) = -h.at(k, k - 1);
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;

                    for j in k..=en {
                        p = h.at(k, j) + q * h.at(k + 1, j);
                        if notlast {
                            p += r * h.at(k + 2, j);
                            *h.at_mut(k + 2, j) -= p * z;
                        }
                        *h.at_mut(k, j) -= p * x;
                        *h.at_mut(k + 1, j) -= p * y;
                    }

                    for i in l..=en.min(k + 3) {
                        p = x * h.at(i, k) + y * h.at(i, k + 1);
                        if notlast {
                            p += z * h.at(i, k + 2);
                            *h.at_mut(i, k + 2) -= p * r;
                        }
                        *h.at_mut(i, k) -= p;
                        *h.at_mut(i, k + 1) -= p * q;
                    }
                }
            }
        }
    }

    Some(re.into_iter().zip(im).map(|(a, b)| Complex64::new(a, b)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangular_input_reads_diagonal() {
        let h = vec![1.0, 5.0, 7.0, 0.0, 2.0, 9.0, 0.0, 0.0, 3.0];
        let mut ev: Vec<f64> = hessenberg_eigenvalues(3, h).unwrap().iter().map(|z| z.re).collect();
        ev.sort_by(f64::total_cmp);
        assert_eq!(ev, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn companion_matrix_roots() {
        // x^3 - 6x^2 + 11x - 6 = (x-1)(x-2)(x-3), companion in Hessenberg form
        let h = vec![6.0, -11.0, 6.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0];
        let mut ev: Vec<f64> = hessenberg_eigenvalues(3, h).unwrap().iter().map(|z| z.re).collect();
        ev.sort_by(f64::total_cmp);
        for (got, want) in ev.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-12, "{ev:?}");
        }
    }

    #[test]
    fn empty_and_scalar() {
        assert!(hessenberg_eigenvalues(0, vec![]).unwrap().is_empty());
        assert_eq!(hessenberg_eigenvalues(1, vec![-4.0]).unwrap(), vec![Complex64::new(-4.0, 0.0)]);
    }
}
