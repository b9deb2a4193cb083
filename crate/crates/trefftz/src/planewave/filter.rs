use crate::geometry::Point;
use crate::scalar::Real;

/// Tangential components closer than this are treated as equal.
pub const TANGENT_TOL: f64 = 1e-12;

/// Result of removing trace-redundant directions on one edge.
#[derive(Clone, Debug, PartialEq)]
pub struct FilteredTrace<T> {
    /// Positions (into the edge direction list) of the retained directions.
    pub retained: Vec<usize>,
    /// Whether the constant function is appended as the last basis function.
    pub has_constant: bool,
    /// For every edge direction, the basis position of the function carrying
    /// its trace.
    pub trace_index: Vec<usize>,
    /// Basis directions: retained directions followed by the zero vector when
    /// the constant is present.
    pub basis_dirs: Vec<Point<T>>,
}

impl<T: Real> FilteredTrace<T> {
    pub fn dim(&self) -> usize {
        self.basis_dirs.len()
    }
}

/// Keeps the first direction of every group sharing a tangential component
/// and adds the constant when no direction is normal to the edge.
pub fn filter_directions<T: Real>(tangent: Point<T>, dirs: &[Point<T>]) -> FilteredTrace<T> {
    let tol = T::lit(TANGENT_TOL);
    let t = tangent.scale(T::one() / tangent.norm());
    let mut retained: Vec<usize> = Vec::new();
    let mut trace_index = Vec::with_capacity(dirs.len());
    for (j, &d) in dirs.iter().enumerate() {
        let hit = retained
            .iter()
            .position(|&l| (d - dirs[l]).dot(t).abs() <= tol);
        match hit {
            Some(pos) => trace_index.push(pos),
            None => {
                trace_index.push(retained.len());
                retained.push(j);
            }
        }
    }
    let has_constant = !dirs.iter().any(|d| d.dot(t).abs() <= tol);
    let mut basis_dirs: Vec<Point<T>> = retained.iter().map(|&j| dirs[j]).collect();
    if has_constant {
        basis_dirs.push(Point::origin());
    }
    FilteredTrace { retained, has_constant, trace_index, basis_dirs }
}
