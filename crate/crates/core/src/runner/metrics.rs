//! Per-generation indicators, front export and the score heatmap, all as CSV.

use serde::Serialize;

use super::archive::StoredArchive;
use crate::evolution::{Population, RunArchive};
use crate::pareto::{hypervolume, igd, nondominated_filter, normalize, NormalizationBounds, ObjectiveVector, ReferencePoint};

/// Written in place of a score for an unfilled population slot.
pub const UNFILLED: &str = "NA";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsRow {
    pub generation: usize,
    pub population_hv: f64,
    pub population_igd: f64,
    pub archive_front_hv: f64,
    pub mean_dd_score: f64,
}

fn admitted(archive: &RunArchive, up_to: usize) -> Vec<(u64, ObjectiveVector)> {
    archive
        .records
        .iter()
        .filter(|r| r.admitted && r.generation <= up_to)
        .filter_map(|r| Some((r.id, ObjectiveVector::new(r.objectives.clone()?).ok()?)))
        .collect()
}

fn front_hv(points: &[ObjectiveVector], bounds: &NormalizationBounds) -> f64 {
    let normalized: Vec<ObjectiveVector> = points.iter().map(|p| normalize(p, bounds)).collect();
    let front: Vec<ObjectiveVector> = nondominated_filter(&normalized)
        .into_iter()
        .map(|i| normalized[i].clone())
        .collect();
    hypervolume(&front, &ReferencePoint::default()).unwrap_or(0.0)
}

fn objectives_of(stored: &StoredArchive, ids: &[u64]) -> Result<Vec<ObjectiveVector>, String> {
    ids.iter()
        .map(|&id| {
            stored
                .record(id)
                .filter(|r| r.admitted)
                .and_then(|r| ObjectiveVector::new(r.objectives.clone()?).ok())
                .ok_or_else(|| format!("snapshot member {id} is not an admitted record"))
        })
        .collect()
}

/// One row per snapshot. Bounds come from every admitted record of the run and
/// the IGD reference set is the non-dominated set of that union.
pub fn compute_metrics(stored: &StoredArchive) -> Result<Vec<MetricsRow>, String> {
    let archive = &stored.archive;
    if archive.snapshots.is_empty() {
        return Err("no generation snapshots".into());
    }
    let union: Vec<ObjectiveVector> = admitted(archive, usize::MAX).into_iter().map(|(_, o)| o).collect();
    let bounds = NormalizationBounds::from_points(&union).map_err(|e| format!("no admitted records: {e}"))?;
    let normalized: Vec<ObjectiveVector> = union.iter().map(|p| normalize(p, &bounds)).collect();
    let reference: Vec<ObjectiveVector> = nondominated_filter(&normalized)
        .into_iter()
        .map(|i| normalized[i].clone())
        .collect();
    let mut rows = Vec::with_capacity(archive.snapshots.len());
    for snap in &archive.snapshots {
        let population = objectives_of(stored, &snap.member_ids)?;
        let pop_norm: Vec<ObjectiveVector> = population.iter().map(|p| normalize(p, &bounds)).collect();
        let to_date: Vec<ObjectiveVector> = admitted(archive, snap.generation).into_iter().map(|(_, o)| o).collect();
        let population_igd = igd(&pop_norm, &reference).map_err(|e| e.to_string())?;
        let mean_dd_score = if snap.dd_scores.is_empty() {
            0.0
        } else {
            snap.dd_scores.iter().sum::<f64>() / snap.dd_scores.len() as f64
        };
        rows.push(MetricsRow {
            generation: snap.generation,
            population_hv: front_hv(&population, &bounds),
            population_igd,
            archive_front_hv: front_hv(&to_date, &bounds),
            mean_dd_score: mean_dd_score + 0.0,
        });
    }
    Ok(rows)
}

pub fn metrics_csv(rows: &[MetricsRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("csv is utf-8")
}

/// Non-dominated members of the last snapshot: id, objectives, description, source.
pub fn front_csv(stored: &StoredArchive) -> Result<String, String> {
    let last = stored.archive.snapshots.last().ok_or("no generation snapshots")?;
    let objectives = objectives_of(stored, &last.member_ids)?;
    let m = objectives.first().map_or(0, ObjectiveVector::len);
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["id".to_string()];
    header.extend((0..m).map(|k| format!("objective_{k}")));
    header.extend(["description".to_string(), "source".to_string()]);
    w.write_record(&header).expect("in-memory csv");
    let mut front = nondominated_filter(&objectives);
    front.sort_by(|&a, &b| objectives[a].lex_cmp(&objectives[b]).then(last.member_ids[a].cmp(&last.member_ids[b])));
    for i in front {
        let record = stored.record(last.member_ids[i]).expect("checked above");
        let mut row = vec![record.id.to_string()];
        row.extend(objectives[i].values().iter().map(|v| v.to_string()));
        row.push(record.description.clone().unwrap_or_default());
        row.push(record.source.clone().unwrap_or_default());
        w.write_record(&row).expect("in-memory csv");
    }
    Ok(String::from_utf8(w.into_inner().expect("in-memory csv")).expect("csv is utf-8"))
}

/// Generations by population slots of dominance-dissimilarity scores.
pub fn heatmap_csv(stored: &StoredArchive) -> Result<String, String> {
    let snapshots = &stored.archive.snapshots;
    if snapshots.is_empty() {
        return Err("no generation snapshots".into());
    }
    let n = stored.header.config.run.population_size;
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["generation".to_string()];
    header.extend((0..n).map(|k| format!("slot_{k}")));
    w.write_record(&header).expect("in-memory csv");
    for snap in snapshots {
        if snap.dd_scores.len() > n {
            return Err(format!("generation {} has more than {n} members", snap.generation));
        }
        let mut row = vec![snap.generation.to_string()];
        row.extend((0..n).map(|k| snap.dd_scores.get(k).map_or(UNFILLED.to_string(), |v| v.to_string())));
        w.write_record(&row).expect("in-memory csv");
    }
    Ok(String::from_utf8(w.into_inner().expect("in-memory csv")).expect("csv is utf-8"))
}

pub struct Progress {
    pub front_size: usize,
    pub archive_hv: f64,
}

/// Population front size and archive-to-date HV under archive-to-date bounds.
pub fn live_progress(archive: &RunArchive, population: &Population) -> Progress {
    let objectives: Vec<ObjectiveVector> = population.members.iter().map(|h| h.objectives.clone()).collect();
    let to_date: Vec<ObjectiveVector> = admitted(archive, usize::MAX).into_iter().map(|(_, o)| o).collect();
    let archive_hv = NormalizationBounds::from_points(&to_date).map_or(0.0, |b| front_hv(&to_date, &b));
    Progress {
        front_size: nondominated_filter(&objectives).len(),
        archive_hv,
    }
}
