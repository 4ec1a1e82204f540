//! CSV dumps of local vertices, decompositions and Bell functionals.

use std::path::Path;

use super::{enumerate_strategies, BellWitness, DeterministicStrategy, LocalMembership};
use crate::error::Result;
use crate::scenario::BellScenario;

/// Outputs per party, inputs in order: `"01|10"` means party 0 answers 0 on
/// input 0 and 1 on input 1, party 1 the reverse.
pub fn strategy_label(s: &DeterministicStrategy, scenario: &BellScenario) -> String {
    (0..scenario.n_parties())
        .map(|p| {
            (0..scenario.n_inputs())
                .map(|x| s.output(p, x).to_string())
                .collect::<Vec<_>>()
                .join(if scenario.n_outputs() > 10 { "," } else { "" })
        })
        .collect::<Vec<_>>()
        .join("|")
}

/// One row per vertex: index, strategy label, then the full probability
/// table.
pub fn write_vertices_csv(scenario: &BellScenario, cap: u128, path: &Path) -> Result<usize> {
    let strategies = enumerate_strategies(scenario, cap)?;
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["vertex".to_string(), "strategy".to_string()];
    header.extend((0..scenario.table_len()).map(|i| format!("p{i}")));
    w.write_record(&header)?;
    for (k, (s, b)) in strategies.iter().enumerate() {
        let mut row = vec![k.to_string(), strategy_label(s, scenario)];
        row.extend(b.table().iter().map(|p| p.to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(strategies.len())
}

/// Vertex index, weight and strategy label for every positive weight.
pub fn write_decomposition_csv(
    scenario: &BellScenario,
    decomposition: &[(usize, f64)],
    path: &Path,
) -> Result<()> {
    let strategies = enumerate_strategies(scenario, super::DEFAULT_VERTEX_CAP)?;
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["vertex", "weight", "strategy"])?;
    for &(k, weight) in decomposition {
        w.write_record([
            k.to_string(),
            weight.to_string(),
            strategy_label(&strategies[k].0, scenario),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Coefficients in coordinate order, followed by `bound` and `value` rows.
pub fn write_witness_csv(witness: &BellWitness, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["coordinate", "coefficient"])?;
    for (i, c) in witness.coefficients.iter().enumerate() {
        w.write_record([i.to_string(), c.to_string()])?;
    }
    w.write_record(["bound".to_string(), witness.bound.to_string()])?;
    w.write_record(["value".to_string(), witness.value.to_string()])?;
    w.flush()?;
    Ok(())
}

/// Decomposition when inside, witness when outside.
pub fn write_local_membership_csv(
    scenario: &BellScenario,
    m: &LocalMembership,
    path: &Path,
) -> Result<()> {
    match &m.witness {
        Some(witness) => write_witness_csv(witness, path),
        None => write_decomposition_csv(scenario, &m.decomposition, path),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::local_membership_lp;
    use crate::scenario::{canonical_box, probs_from_correlators, BoxLabel};

    #[test]
    fn vertex_csv_has_sixteen_rows() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("v.csv");
        assert_eq!(
            write_vertices_csv(&BellScenario::CHSH, 100, &path).unwrap(),
            16
        );
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert!(lines.next().unwrap().starts_with("vertex,strategy,p0,"));
        assert_eq!(lines.next().unwrap().split(',').nth(1), Some("00|00"));
        assert_eq!(text.lines().count(), 17);
    }

    #[test]
    fn witness_and_decomposition_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("w.csv");
        let ptb = probs_from_correlators(&canonical_box(BoxLabel::Tsirelson)).unwrap();
        let m = local_membership_lp(&ptb).unwrap();
        write_local_membership_csv(&BellScenario::CHSH, &m, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 1 + 8 + 2);
        assert!(text.contains("\nbound,2"));

        let p14 = probs_from_correlators(&canonical_box(BoxLabel::P1to4)).unwrap();
        let m = local_membership_lp(&p14).unwrap();
        write_local_membership_csv(&BellScenario::CHSH, &m, &path).unwrap();
        let rows = std::fs::read_to_string(&path).unwrap().lines().count() - 1;
        assert!(rows >= 4);
    }
}
