//! `all`: the full verification suite in one run.

use std::time::Instant;

use cornerhodge::report::{ChartSeries, CsvTable, SvgChart, Verdict};

use crate::config::{CliError, Ctx};
use crate::{geometry, map, oracle, spectral};

/// Runs every subcommand with its acceptance-grade defaults (still
/// honoring the config file), writes their artifacts plus a summary, and
/// passes only when every step passes.
pub fn all(ctx: &Ctx) -> Result<Verdict, CliError> {
    let steps: Vec<(&str, Box<dyn Fn(&Ctx) -> Result<Verdict, CliError>>)> = vec![
        ("chi", Box::new(|c| geometry::chi(c, &Default::default()))),
        ("angles", Box::new(|c| geometry::angles(c, &Default::default()))),
        ("turning", Box::new(|c| geometry::turning(c, &Default::default()))),
        ("capacity", Box::new(|c| oracle::capacity(c, &Default::default()))),
        ("bochner", Box::new(|c| oracle::bochner(c, &Default::default()))),
        ("spectrum", Box::new(|c| spectral::spectrum(c, &Default::default()))),
        ("index", Box::new(|c| spectral::index(c, &Default::default()))),
        ("gap", Box::new(|c| spectral::gap(c, &Default::default()))),
        ("cornermap", Box::new(|c| map::cornermap(c, &Default::default()))),
    ];

    let mut table = CsvTable::new(&["step", "verdict"]);
    let mut seconds = Vec::new();
    let mut verdict = Verdict::Pass;
    for (name, run) in &steps {
        println!("--- {name} ---");
        let start = Instant::now();
        let step_verdict = run(ctx)?;
        seconds.push((seconds.len() as f64, start.elapsed().as_secs_f64()));
        verdict = verdict.combine(step_verdict);
        table.push_row(vec![name.to_string(), step_verdict.to_string()]);
        println!();
    }
    table.write(&ctx.out_path("all.csv"))?;
    SvgChart {
        title: "wall time per verification step".to_string(),
        x_label: "step index".to_string(),
        y_label: "seconds".to_string(),
        log_x: false,
        log_y: true,
        series: vec![ChartSeries { name: "wall time".to_string(), points: seconds }],
    }
    .write(&ctx.out_path("all.svg"))?;
    println!("all: {verdict} ({} steps)", steps.len());
    Ok(verdict)
}
