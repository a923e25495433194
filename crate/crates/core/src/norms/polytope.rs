//! Exact geometry of symmetric rational polytopes `{x : |g_i · x| ≤ 1}`.

use std::cmp::Ordering;

use num_traits::{One, Signed, Zero};

use crate::exactreal::{int, Enclosure, Rational};

pub(crate) fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

/// Solves `A x = b` exactly; `None` when singular.
pub(crate) fn solve(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let n = a.len();
    let mut m: Vec<Vec<Rational>> = a.iter().zip(b).map(|(row, bi)| row.iter().cloned().chain(std::iter::once(bi.clone())).collect()).collect();
    for col in 0..n {
        let piv = (col..n).find(|&i| !m[i][col].is_zero())?;
        m.swap(col, piv);
        let p = m[col][col].clone();
        for j in col..=n {
            m[col][j] = &m[col][j] / &p;
        }
        for i in 0..n {
            if i != col && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                for j in col..=n {
                    let v = &m[col][j] * &f;
                    m[i][j] -= v;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n].clone()).collect())
}

fn rank(vectors: &[Vec<Rational>]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let mut m: Vec<Vec<Rational>> = vectors.to_vec();
    let cols = m[0].len();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        for i in r + 1..m.len() {
            if !m[i][c].is_zero() {
                let f = &m[i][c] / &m[r][c];
                for j in c..cols {
                    let v = &m[r][j] * &f;
                    m[i][j] -= v;
                }
            }
        }
        r += 1;
        if r == m.len() {
            break;
        }
    }
    r
}

pub(crate) fn spans(vectors: &[Vec<Rational>], n: usize) -> bool {
    rank(vectors) == n
}

fn subsets(m: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            rec(i + 1, m, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, m, k, &mut Vec::new(), &mut out);
    out
}

/// All vertices of `{x : |g_i · x| ≤ 1 ∀i}` (assumed bounded).
pub(crate) fn vertices(g: &[Vec<Rational>], n: usize) -> Vec<Vec<Rational>> {
    let mut out: Vec<Vec<Rational>> = Vec::new();
    for s in subsets(g.len(), n) {
        let a: Vec<Vec<Rational>> = s.iter().map(|&i| g[i].clone()).collect();
        for signs in 0..(1u32 << n) {
            let b: Vec<Rational> = (0..n).map(|k| if signs >> k & 1 == 1 { -Rational::one() } else { Rational::one() }).collect();
            let Some(x) = solve(&a, &b) else { break };
            if g.iter().all(|gi| dot(gi, &x).abs() <= Rational::one()) && !out.contains(&x) {
                out.push(x);
            }
        }
    }
    out
}

/// Counter-clockwise order of 2-D points around the origin.
fn angular_cmp(a: &[Rational], b: &[Rational]) -> Ordering {
    let half = |p: &[Rational]| p[1].is_negative() || (p[1].is_zero() && p[0].is_negative());
    match (half(a), half(b)) {
        (false, true) => Ordering::Less,
        (true, false) => Ordering::Greater,
        _ => {
            let cross = &a[0] * &b[1] - &a[1] * &b[0];
            Rational::zero().cmp(&cross)
        }
    }
}

fn shoelace(poly: &[Vec<Rational>]) -> Rational {
    let k = poly.len();
    let mut s = Rational::zero();
    for i in 0..k {
        let (p, q) = (&poly[i], &poly[(i + 1) % k]);
        s += &p[0] * &q[1] - &p[1] * &q[0];
    }
    s.abs() / int(2)
}

fn det3(a: &[Rational], b: &[Rational], c: &[Rational]) -> Rational {
    &a[0] * (&b[1] * &c[2] - &b[2] * &c[1]) - &a[1] * (&b[0] * &c[2] - &b[2] * &c[0]) + &a[2] * (&b[0] * &c[1] - &b[1] * &c[0])
}

/// Exact volume in dimensions 1–3; `None` above.
pub(crate) fn exact_volume(g: &[Vec<Rational>], verts: &[Vec<Rational>], n: usize) -> Option<Rational> {
    match n {
        1 => verts.iter().map(|v| v[0].abs()).max().map(|m| m * int(2)),
        2 => {
            let mut vs = verts.to_vec();
            vs.sort_by(|a, b| angular_cmp(a, b));
            Some(shoelace(&vs))
        }
        3 => {
            // Fan-triangulate each facet and sum tetrahedra with apex at 0.
            let mut seen: Vec<Vec<Rational>> = Vec::new();
            let mut vol = Rational::zero();
            for gi in g {
                for sign in [Rational::one(), -Rational::one()] {
                    let normal: Vec<Rational> = gi.iter().map(|x| x * &sign).collect();
                    if seen.contains(&normal) {
                        continue;
                    }
                    seen.push(normal.clone());
                    let on: Vec<Vec<Rational>> = verts.iter().filter(|v| dot(&normal, v) == Rational::one()).cloned().collect();
                    if on.len() < 3 {
                        continue;
                    }
                    let k = on.len();
                    let centroid: Vec<Rational> = (0..3).map(|j| on.iter().fold(Rational::zero(), |a, v| a + &v[j]) / int(k as i64)).collect();
                    let drop = (0..3).rev().find(|&j| !normal[j].is_zero()).unwrap();
                    let proj = |v: &Vec<Rational>| -> Vec<Rational> { (0..3).filter(|&j| j != drop).map(|j| &v[j] - &centroid[j]).collect() };
                    let mut ordered = on.clone();
                    ordered.sort_by(|a, b| angular_cmp(&proj(a), &proj(b)));
                    for t in 1..k - 1 {
                        vol += det3(&ordered[0], &ordered[t], &ordered[t + 1]).abs() / int(6);
                    }
                }
            }
            Some(vol)
        }
        _ => None,
    }
}

/// `max_i Σ_j |g_ij|`: the largest gauge value on the unit cube.
pub(crate) fn cube_max(g: &[Vec<Rational>]) -> Rational {
    g.iter().map(|gi| gi.iter().fold(Rational::zero(), |a, x| a + x.abs())).max().unwrap_or_else(Rational::zero)
}

/// `max |x|_∞` over the polytope, from its vertices.
pub(crate) fn sup_radius(verts: &[Vec<Rational>]) -> Rational {
    verts.iter().flat_map(|v| v.iter().map(|x| x.abs())).max().unwrap_or_else(Rational::zero)
}

/// Volume enclosure for any dimension: `[(2/R)^n, (2K)^n]`.
pub(crate) fn volume_bounds(r_f: &Rational, k_f: &Rational, n: usize) -> Enclosure {
    let two = int(2);
    let lo = (&two / r_f).pow(n as i32);
    let hi = (&two * k_f).pow(n as i32);
    Enclosure::new(lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactreal::rat;

    fn fstar() -> Vec<Vec<Rational>> {
        vec![vec![rat(1, 4), rat(1, 4)], vec![int(1), int(-1)]]
    }

    #[test]
    fn fstar_geometry() {
        let g = fstar();
        let v = vertices(&g, 2);
        assert_eq!(v.len(), 4);
        assert!(v.contains(&vec![rat(5, 2), rat(3, 2)]));
        assert_eq!(exact_volume(&g, &v, 2), Some(int(8)));
        assert_eq!(cube_max(&g), int(2));
        assert_eq!(sup_radius(&v), rat(5, 2));
    }

    #[test]
    fn cube_and_octahedron_volumes() {
        let cube: Vec<Vec<Rational>> = (0..3).map(|i| (0..3).map(|j| if i == j { int(1) } else { int(0) }).collect()).collect();
        let v = vertices(&cube, 3);
        assert_eq!(v.len(), 8);
        assert_eq!(exact_volume(&cube, &v, 3), Some(int(8)));
        let mut oct = Vec::new();
        for s1 in [1, -1] {
            for s2 in [1, -1] {
                oct.push(vec![int(1), int(s1), int(s2)]);
            }
        }
        let v = vertices(&oct, 3);
        assert_eq!(v.len(), 6);
        assert_eq!(exact_volume(&oct, &v, 3), Some(rat(4, 3)));
    }

    #[test]
    fn redundant_facets_do_not_change_volume() {
        let g = vec![vec![int(1), int(0)], vec![int(0), int(1)], vec![rat(1, 2), rat(1, 2)]];
        let v = vertices(&g, 2);
        assert_eq!(exact_volume(&g, &v, 2), Some(int(4)));
    }
}
