//! Non-dominated filtering, hypervolume and IGD on a small two-objective set.
//!
//! cargo run --example pareto_indicators

use meoh::pareto::{hypervolume, igd, nondominated_filter, normalize, NormalizationBounds, ObjectiveVector, ReferencePoint};

fn main() {
    let raw = [[0.02, 900.0], [0.05, 300.0], [0.03, 950.0], [0.10, 100.0], [0.06, 320.0]];
    let points: Vec<ObjectiveVector> = raw.iter().map(|p| ObjectiveVector::new(p.to_vec()).unwrap()).collect();
    let front = nondominated_filter(&points);
    println!("front indices {front:?}");

    let bounds = NormalizationBounds::from_points(&points).unwrap();
    let normalized: Vec<ObjectiveVector> = points.iter().map(|p| normalize(p, &bounds)).collect();
    let front_points: Vec<ObjectiveVector> = front.iter().map(|&i| normalized[i].clone()).collect();
    let hv = hypervolume(&front_points, &ReferencePoint::default()).unwrap();
    println!("normalized hypervolume {hv:.4}");

    let dominated: Vec<ObjectiveVector> = [2, 4].iter().map(|&i| normalized[i].clone()).collect();
    println!("IGD of the dominated pair {:.4}", igd(&dominated, &front_points).unwrap());
    println!("IGD of the front itself {}", igd(&front_points, &front_points).unwrap());
}
