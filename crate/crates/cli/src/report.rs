use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use echelon_core::harness::{
    central_fill_summary, comparisons_from_table, error_metrics, fill_rate_deviation, metric, ranking_report,
    read_results_file, wait_summary, Group, ResultTable, WaitComparison,
};
use echelon_core::wait_time::Method;
use echelon_core::{Error, Result};

/// Q/μ threshold separating frequent from infrequent local orders.
const Q_OVER_MU_SPLIT: f64 = 25.0;

pub fn run(results: &Path, out: Option<&Path>) -> Result<()> {
    let rows = read_results_file(results)?;
    let table = ResultTable::from_rows(&rows);
    let text = render(&table)?;
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pct(x: f64) -> String {
    format!("{:.2}%", 100.0 * x)
}

pub fn render(table: &ResultTable) -> Result<String> {
    let mut s = String::new();
    let w = &mut s;

    writeln!(w, "# central fill rate (simulated, mean over cases)").unwrap();
    writeln!(w, "{:<14} {:>6} {:>9}", "scenario", "cases", "fill").unwrap();
    for (scenario, f, n) in central_fill_summary(table) {
        writeln!(w, "{scenario:<14} {n:>6} {:>9}", pct(f)).unwrap();
    }

    writeln!(w, "\n# wait time (days)").unwrap();
    writeln!(w, "{:<14} {:<12} {:>6} {:>9} {:>9}", "scenario", "source", "n", "mean", "sd").unwrap();
    for r in wait_summary(table) {
        writeln!(w, "{:<14} {:<12} {:>6} {:>9.3} {:>9.3}", r.scenario, r.source, r.n, r.mean, r.sd).unwrap();
    }

    let methods: Vec<(Method, Vec<WaitComparison>)> = table
        .methods()
        .iter()
        .filter_map(|m| m.parse::<Method>().ok().map(|method| (method, comparisons_from_table(table, m))))
        .filter(|(_, c)| !c.is_empty())
        .collect();

    writeln!(w, "\n# errors, computed minus simulated (days)").unwrap();
    writeln!(
        w,
        "{:<14} {:<6} {:>6} {:>10} {:>10} {:>10} {:>10}",
        "scenario", "method", "n", "mean_err", "mean_abs", "sd_err", "sd_abs"
    )
    .unwrap();
    let mut scenarios: BTreeSet<String> = table.scenarios().into_iter().collect();
    scenarios.insert("all".into());
    for scenario in &scenarios {
        for (method, items) in &methods {
            let subset: Vec<WaitComparison> =
                items.iter().filter(|c| scenario == "all" || &c.key.scenario == scenario).cloned().collect();
            if subset.is_empty() {
                continue;
            }
            let e = error_metrics(&subset);
            writeln!(
                w,
                "{:<14} {:<6} {:>6} {:>10.3} {:>10.3} {:>10.3} {:>10.3}",
                scenario, method.tag(), e.n, e.mean.error, e.mean.absolute_error, e.sd.error, e.sd.absolute_error
            )
            .unwrap();
        }
    }

    if methods.len() >= 2 {
        let q_mu = |c: &WaitComparison| c.attribute(metric::Q_OVER_MU);
        let mut groups = vec![
            Group::all(),
            Group::new(&format!("Q/mu<{Q_OVER_MU_SPLIT}"), move |c| q_mu(c).is_some_and(|x| x < Q_OVER_MU_SPLIT)),
            Group::new(&format!("Q/mu>={Q_OVER_MU_SPLIT}"), move |c| q_mu(c).is_some_and(|x| x >= Q_OVER_MU_SPLIT)),
        ];
        for scenario in table.scenarios() {
            let name = scenario.clone();
            groups.push(Group::new(&name, move |c| c.key.scenario == scenario));
        }
        let report = ranking_report(&methods, &groups)?;
        writeln!(w, "\n# rankings by absolute error (best / 2nd or better / worst)").unwrap();
        writeln!(w, "{:<14} {:<6} {:>6} {:>26} {:>26} {:>9}", "group", "method", "n", "mean", "sd", "both").unwrap();
        for r in &report.rows {
            let f = |x: &echelon_core::harness::RankFractions| {
                format!("{} / {} / {}", pct(x.best), pct(x.second_or_better), pct(x.worst))
            };
            writeln!(
                w,
                "{:<14} {:<6} {:>6} {:>26} {:>26} {:>9}",
                r.group,
                r.method.tag(),
                r.n,
                f(&r.mean),
                f(&r.sd),
                pct(r.combined_best)
            )
            .unwrap();
        }
        for g in &report.empty_groups {
            writeln!(w, "{g:<14} (no instances)").unwrap();
        }
    }

    let deviation = fill_rate_deviation(table);
    if !deviation.is_empty() {
        writeln!(w, "\n# local fill rate, simulated minus target").unwrap();
        writeln!(w, "{:<14} {:<6} {:>10}", "scenario", "method", "deviation").unwrap();
        for (scenario, method, d) in deviation {
            writeln!(w, "{scenario:<14} {method:<6} {:>10}", pct(d)).unwrap();
        }
    }

    let price_cases: BTreeSet<String> = table
        .methods()
        .iter()
        .flat_map(|m| table.instances(m).map(|(k, _)| k.case.clone()).collect::<Vec<_>>())
        .filter(|c| c.starts_with("central_price_"))
        .collect();
    if !price_cases.is_empty() {
        let list: Vec<&str> = price_cases.iter().map(String::as_str).collect();
        writeln!(w, "\nnote: {} vary only the central price, which no calculation uses", list.join(", ")).unwrap();
    }
    Ok(s)
}
