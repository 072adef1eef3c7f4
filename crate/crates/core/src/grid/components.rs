use super::ScalarField;

/// 4-connected components of `{indicator ≥ threshold}`.
///
/// Labels start at 1 and follow the row-major order of each component's first
/// point; 0 marks the background. Connectivity does not wrap around the
/// periodic boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct Components {
    pub labels: Vec<u32>,
    pub count: usize,
    /// Grid points per component, indexed by `label - 1`.
    pub counts: Vec<usize>,
    /// `counts · dx²`.
    pub areas: Vec<f64>,
}

pub fn connected_components(indicator: &ScalarField, threshold: f64) -> Components {
    let grid = indicator.grid();
    let n = grid.n();
    let v = indicator.values();
    let mut labels = vec![0u32; v.len()];
    let mut counts = Vec::new();
    let mut stack = Vec::new();
    for start in 0..v.len() {
        if labels[start] != 0 || v[start] < threshold {
            continue;
        }
        let label = counts.len() as u32 + 1;
        labels[start] = label;
        stack.push(start);
        let mut size = 0;
        while let Some(p) = stack.pop() {
            size += 1;
            let (i, j) = (p % n, p / n);
            let mut visit = |q: usize| {
                if labels[q] == 0 && v[q] >= threshold {
                    labels[q] = label;
                    stack.push(q);
                }
            };
            if i > 0 {
                visit(p - 1);
            }
            if i + 1 < n {
                visit(p + 1);
            }
            if j > 0 {
                visit(p - n);
            }
            if j + 1 < n {
                visit(p + n);
            }
        }
        counts.push(size);
    }
    let area = grid.cell_area();
    Components { labels, count: counts.len(), areas: counts.iter().map(|&c| c as f64 * area).collect(), counts }
}
