//! Connectivity tracking and per-particle area bookkeeping.

use serde::{Deserialize, Serialize};

use crate::grid::{connected_components, Components, ScalarField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TopologyKind {
    Split,
    Merge,
}

/// Change in the number of particles between two consecutive states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopologyEvent {
    /// Index of the state in which the new component count first appears.
    pub step: usize,
    pub kind: TopologyKind,
    pub components_before: usize,
    pub components_after: usize,
    /// Areas of the components after the event, in label order.
    pub areas: Vec<f64>,
}

/// 4-connected particles of an indicator.
pub fn particle_components(particle: &ScalarField) -> Components {
    connected_components(particle, 0.5)
}

/// Compares the component counts of two states.
pub fn classify_change(step: usize, before: &Components, after: &Components) -> Option<TopologyEvent> {
    let kind = match after.count.cmp(&before.count) {
        std::cmp::Ordering::Greater => TopologyKind::Split,
        std::cmp::Ordering::Less => TopologyKind::Merge,
        std::cmp::Ordering::Equal => return None,
    };
    Some(TopologyEvent {
        step,
        kind,
        components_before: before.count,
        components_after: after.count,
        areas: after.areas.clone(),
    })
}

/// Assigns every grid point to its nearest component by Euclidean distance to
/// the component's points; ties go to the lower label. Returns labels in
/// `1..=count`.
pub fn nearest_component_regions(components: &Components, n: usize) -> Vec<u32> {
    let mut best_d = vec![f64::INFINITY; n * n];
    let mut region = vec![0u32; n * n];
    let mut mask = vec![false; n * n];
    for label in 1..=components.count as u32 {
        for (m, &l) in mask.iter_mut().zip(&components.labels) {
            *m = l == label;
        }
        let d = squared_distance_transform(&mask, n);
        for ((b, r), &v) in best_d.iter_mut().zip(region.iter_mut()).zip(&d) {
            // labels run upwards, so strict comparison keeps the lower one on ties
            if v < *b {
                *b = v;
                *r = label;
            }
        }
    }
    region
}

/// Squared distance in grid units from every point to the nearest `true`
/// point, without periodic wrap.
pub fn squared_distance_transform(mask: &[bool], n: usize) -> Vec<f64> {
    let mut d: Vec<f64> = mask.iter().map(|&m| if m { 0.0 } else { f64::INFINITY }).collect();
    let mut f = vec![0.0; n];
    let mut out = vec![0.0; n];
    let mut v = vec![0usize; n];
    let mut z = vec![0.0; n + 1];
    for j in 0..n {
        f.copy_from_slice(&d[j * n..(j + 1) * n]);
        edt_1d(&f, &mut out, &mut v, &mut z);
        d[j * n..(j + 1) * n].copy_from_slice(&out);
    }
    for i in 0..n {
        for j in 0..n {
            f[j] = d[j * n + i];
        }
        edt_1d(&f, &mut out, &mut v, &mut z);
        for j in 0..n {
            d[j * n + i] = out[j];
        }
    }
    d
}

/// Lower envelope of parabolas `(x - q)² + f(q)`; infinite `f` are skipped.
fn edt_1d(f: &[f64], out: &mut [f64], v: &mut [usize], z: &mut [f64]) {
    let n = f.len();
    let mut k: isize = -1;
    for q in 0..n {
        if !f[q].is_finite() {
            continue;
        }
        loop {
            if k < 0 {
                k = 0;
                v[0] = q;
                z[0] = f64::NEG_INFINITY;
                z[1] = f64::INFINITY;
                break;
            }
            let p = v[k as usize];
            let s = ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2.0 * (q as f64 - p as f64));
            if s <= z[k as usize] {
                k -= 1;
            } else {
                k += 1;
                v[k as usize] = q;
                z[k as usize] = s;
                z[k as usize + 1] = f64::INFINITY;
                break;
            }
        }
    }
    if k < 0 {
        out.iter_mut().for_each(|o| *o = f64::INFINITY);
        return;
    }
    let mut k = 0usize;
    for (q, o) in out.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let p = v[k];
        let dq = q as f64 - p as f64;
        *o = dq * dq + f[p];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use proptest::prelude::*;

    fn brute(mask: &[bool], n: usize) -> Vec<f64> {
        let pts: Vec<(usize, usize)> = (0..n * n).filter(|&k| mask[k]).map(|k| (k % n, k / n)).collect();
        (0..n * n)
            .map(|k| {
                let (i, j) = (k % n, k / n);
                pts.iter()
                    .map(|&(a, b)| (i as f64 - a as f64).powi(2) + (j as f64 - b as f64).powi(2))
                    .fold(f64::INFINITY, f64::min)
            })
            .collect()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn distance_transform_matches_brute_force(bits in proptest::collection::vec(proptest::bool::weighted(0.1), 256)) {
            let d = squared_distance_transform(&bits, 16);
            prop_assert_eq!(d, brute(&bits, 16));
        }
    }

    #[test]
    fn regions_split_between_two_blobs() {
        let g = Grid::new(0.0, 16.0, 0.0, 16.0, 16).unwrap();
        let f = ScalarField::indicator(g, |x, y| {
            (y - 8.0).abs() < 1.5 && ((x - 3.0).abs() < 1.5 || (x - 12.0).abs() < 1.5)
        });
        let c = particle_components(&f);
        assert_eq!(c.count, 2);
        let r = nearest_component_regions(&c, 16);
        assert_eq!(r[8 * 16], 1);
        assert_eq!(r[8 * 16 + 15], 2);
        // equidistant column: x = 7.5 is not a grid point; columns 7 and 8
        // are nearer to the left and right blobs respectively
        assert_eq!(r[8 * 16 + 7], 1);
        assert_eq!(r[8 * 16 + 8], 2);
        assert!(r.iter().all(|&l| l == 1 || l == 2));
    }

    #[test]
    fn ties_go_to_lower_label() {
        let g = Grid::new(0.0, 16.0, 0.0, 16.0, 16).unwrap();
        let f = ScalarField::indicator(g, |x, y| y == 0.0 && (x == 2.0 || x == 6.0));
        let c = particle_components(&f);
        let r = nearest_component_regions(&c, 16);
        assert_eq!(r[4], 1);
    }

    #[test]
    fn events_follow_counts() {
        let g = Grid::new(0.0, 16.0, 0.0, 16.0, 16).unwrap();
        let one = particle_components(&ScalarField::indicator(g, |x, _| x < 4.0));
        let two = particle_components(&ScalarField::indicator(g, |x, _| x < 2.0 || (x > 5.0 && x < 8.0)));
        assert_eq!(classify_change(3, &one, &one), None);
        let e = classify_change(4, &one, &two).unwrap();
        assert_eq!(e.kind, TopologyKind::Split);
        assert_eq!((e.components_before, e.components_after, e.step), (1, 2, 4));
        assert_eq!(classify_change(5, &two, &one).unwrap().kind, TopologyKind::Merge);
    }
}
