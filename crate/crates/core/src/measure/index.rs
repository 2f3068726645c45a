use std::collections::HashMap;

use num_complex::Complex64;

/// Uniform grid over weighted points for ball-mass queries.
#[derive(Debug, Clone)]
pub struct BallIndex {
    cell: f64,
    points: Vec<Complex64>,
    masses: Vec<f64>,
    cells: HashMap<(i64, i64), Vec<u32>>,
}

impl BallIndex {
    pub fn new(points: Vec<Complex64>, masses: Vec<f64>, cell: f64) -> Self {
        assert_eq!(points.len(), masses.len());
        assert!(cell > 0.0 && cell.is_finite(), "cell size must be positive");
        let mut cells: HashMap<(i64, i64), Vec<u32>> = HashMap::new();
        for (i, &p) in points.iter().enumerate() {
            cells.entry(key(p, cell)).or_default().push(i as u32);
        }
        BallIndex { cell, points, masses, cells }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Total mass of points with `|p - z| <= r`.
    pub fn ball_mass(&self, z: Complex64, r: f64) -> f64 {
        let (x0, y0) = key(z - Complex64::new(r, r), self.cell);
        let (x1, y1) = key(z + Complex64::new(r, r), self.cell);
        let span = (x1 - x0 + 1) as u64 * (y1 - y0 + 1) as u64;
        let mut total = 0.0;
        if span > self.cells.len() as u64 {
            // a huge ball: scanning occupied cells is cheaper
            let mut keys: Vec<_> = self.cells.keys().filter(|(x, y)| (x0..=x1).contains(x) && (y0..=y1).contains(y)).collect();
            keys.sort();
            for k in keys {
                total += self.cell_mass(&self.cells[k], z, r);
            }
            return total;
        }
        for x in x0..=x1 {
            for y in y0..=y1 {
                if let Some(ids) = self.cells.get(&(x, y)) {
                    total += self.cell_mass(ids, z, r);
                }
            }
        }
        total
    }

    fn cell_mass(&self, ids: &[u32], z: Complex64, r: f64) -> f64 {
        ids.iter()
            .filter(|&&i| (self.points[i as usize] - z).norm() <= r)
            .map(|&i| self.masses[i as usize])
            .sum()
    }
}

fn key(z: Complex64, cell: f64) -> (i64, i64) {
    ((z.re / cell).floor() as i64, (z.im / cell).floor() as i64)
}
