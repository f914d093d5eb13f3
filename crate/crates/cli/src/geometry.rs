//! `chi`, `angles` and `turning`: combinatorial and boundary geometry runs.

use std::f64::consts::PI;

use clap::Args;
use cornerhodge::meshgen::{structured_rectilinear, triangulate, SimplicialMesh};
use cornerhodge::polygeom::{corner_turning_integrals, PolygonalDomain};
use cornerhodge::report::{fmt_g17, ChartSeries, CsvTable, SvgChart, Verdict};

use crate::config::{CliError, Ctx};
use crate::domains;

/// Worst acceptable defect in the discrete Gauss–Bonnet loop sums; the
/// angles come from `atan2`, so anything beyond roundoff is a geometry bug.
const GAUSS_BONNET_TOL: f64 = 1e-12;

/// Quadrature agreement required of the signed turning integral.
const TURNING_TOL: f64 = 1e-8;

#[derive(Args, Debug, Default)]
pub struct ChiArgs {
    /// Domain name or file; default runs every named domain.
    #[arg(long)]
    pub domain: Option<String>,
    /// Comma-separated mesh sizes, clamped per domain to the shortest edge.
    #[arg(long, value_name = "LIST")]
    pub h: Option<String>,
    /// Corner-grading exponent for the mesher (1 = uniform).
    #[arg(long)]
    pub grading: Option<f64>,
    /// Force the structured rectilinear mesher instead of auto-detection.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub structured: Option<bool>,
}

fn mesh_domain(
    domain: &PolygonalDomain,
    h: f64,
    grading: f64,
    structured: bool,
) -> Result<SimplicialMesh, CliError> {
    if structured {
        Ok(structured_rectilinear(domain, h, grading)?)
    } else {
        Ok(triangulate(domain, h, grading)?)
    }
}

pub fn chi(ctx: &Ctx, args: &ChiArgs) -> Result<Verdict, CliError> {
    let hs = ctx.list(args.h.as_deref(), "h", &[0.4, 0.2, 0.1])?;
    let grading = ctx.scalar(args.grading, "grading", 1.0)?;
    let structured = ctx.scalar(args.structured, "structured", false)?;
    let selector = ctx.string_opt(args.domain.as_deref(), "domain");
    let domains: Vec<PolygonalDomain> = match selector.as_deref() {
        Some(name) => vec![domains::resolve(name)?],
        None => domains::all_named()?,
    };

    let mut table = CsvTable::new(&[
        "domain", "h", "vertices", "edges", "triangles", "mesh_chi", "domain_chi", "verdict",
    ]);
    let mut series = Vec::new();
    let mut verdict = Verdict::Pass;
    for domain in &domains {
        let expected = domain.euler_characteristic();
        let mut points = Vec::new();
        let mut agreed = 0usize;
        for &h_requested in &hs {
            let h = h_requested.min(domain.shortest_edge());
            let mesh = mesh_domain(domain, h, grading, structured)?;
            let mesh_chi = mesh.euler_characteristic();
            let row_verdict = if mesh_chi == expected { Verdict::Pass } else { Verdict::Fail };
            verdict = verdict.combine(row_verdict);
            agreed += (row_verdict == Verdict::Pass) as usize;
            table.push_row(vec![
                domain.name().to_string(),
                fmt_g17(h),
                mesh.num_vertices().to_string(),
                mesh.num_edges().to_string(),
                mesh.num_triangles().to_string(),
                mesh_chi.to_string(),
                expected.to_string(),
                row_verdict.to_string(),
            ]);
            points.push((h, mesh.num_triangles() as f64));
        }
        series.push(ChartSeries { name: domain.name().to_string(), points });
        println!(
            "chi({}) = {expected}; V - E + F agrees at {agreed}/{} levels",
            domain.name(),
            hs.len()
        );
    }
    table.write(&ctx.out_path("chi.csv"))?;
    SvgChart {
        title: "triangle count under refinement".to_string(),
        x_label: "h".to_string(),
        y_label: "triangles".to_string(),
        log_x: true,
        log_y: true,
        series,
    }
    .write(&ctx.out_path("chi.svg"))?;
    println!("chi: {verdict} ({} domains, {} levels each)", domains.len(), hs.len());
    Ok(verdict)
}

#[derive(Args, Debug, Default)]
pub struct AnglesArgs {
    /// Domain name or file.
    #[arg(long)]
    pub domain: Option<String>,
}

pub fn angles(ctx: &Ctx, args: &AnglesArgs) -> Result<Verdict, CliError> {
    let selector = ctx.string(args.domain.as_deref(), "domain", "square-annulus");
    let domain = domains::resolve(&selector)?;
    let corners = domain.interior_angles();

    let mut table =
        CsvTable::new(&["loop", "vertex", "x", "y", "interior_angle", "exterior_turn"]);
    let loops = domain.loops().len();
    let mut sums = vec![0.0f64; loops];
    let mut series: Vec<ChartSeries> = (0..loops)
        .map(|l| ChartSeries {
            name: if l == 0 { "outer loop".to_string() } else { format!("hole {l}") },
            points: Vec::new(),
        })
        .collect();
    for c in &corners {
        let turn = PI - c.interior_angle;
        sums[c.loop_index] += turn;
        table.push_row(vec![
            c.loop_index.to_string(),
            c.vertex_index.to_string(),
            fmt_g17(c.position.x),
            fmt_g17(c.position.y),
            fmt_g17(c.interior_angle),
            fmt_g17(turn),
        ]);
        series[c.loop_index].points.push((c.vertex_index as f64, c.interior_angle));
    }

    // Each loop of a polygon turns through a full circle: +2π for the
    // outer loop, −2π around every hole.
    let mut verdict = Verdict::Pass;
    for (l, &sum) in sums.iter().enumerate() {
        let expected = if l == 0 { 2.0 * PI } else { -2.0 * PI };
        let defect = (sum - expected).abs();
        if defect > GAUSS_BONNET_TOL {
            verdict = Verdict::Fail;
        }
        println!(
            "loop {l}: {} corners, exterior turns sum to {:+.12} (expected {:+.12})",
            corners.iter().filter(|c| c.loop_index == l).count(),
            sum,
            expected
        );
    }
    table.write(&ctx.out_path("angles.csv"))?;
    SvgChart {
        title: format!("interior angles of {}", domain.name()),
        x_label: "corner index".to_string(),
        y_label: "interior angle (rad)".to_string(),
        log_x: false,
        log_y: false,
        series,
    }
    .write(&ctx.out_path("angles.svg"))?;
    println!("angles: {verdict} ({} corners on {} loops)", corners.len(), loops);
    Ok(verdict)
}

#[derive(Args, Debug, Default)]
pub struct TurningArgs {
    /// Comma-separated interior angles in radians.
    #[arg(long, value_name = "LIST")]
    pub theta: Option<String>,
    /// Corner rounding radius (incident edges have unit length).
    #[arg(long)]
    pub radius: Option<f64>,
    /// Quadrature panels along the rounding arc.
    #[arg(long)]
    pub quad_points: Option<usize>,
}

pub fn turning(ctx: &Ctx, args: &TurningArgs) -> Result<Verdict, CliError> {
    let thetas =
        ctx.list(args.theta.as_deref(), "theta", &[PI / 2.0, PI, 3.0 * PI / 2.0])?;
    let radius = ctx.scalar(args.radius, "radius", 0.2)?;
    let panels = ctx.scalar(args.quad_points, "quad-points", 64)?;

    let mut table = CsvTable::new(&[
        "theta",
        "radius",
        "signed_turning",
        "corner_turn",
        "identity_residual",
        "absolute_turning",
        "lower_bound_holds",
        "verdict",
    ]);
    let mut signed_series = Vec::new();
    let mut bound_series = Vec::new();
    let mut verdict = Verdict::Pass;
    for &theta in &thetas {
        let rep = corner_turning_integrals(theta, radius, panels)?;
        let residual = (rep.signed_turning - rep.corner_turn).abs();
        // The rounded corner must reproduce the turn π − θ exactly, and
        // the curvature lower bound −∫|k| ≥ −(π − θ) is a theorem for
        // θ ≤ π and must be seen to fail beyond it.
        let expected_hold = theta <= PI + 1e-12;
        let row_ok = residual <= TURNING_TOL && rep.lower_bound_holds == expected_hold;
        let row_verdict = if row_ok { Verdict::Pass } else { Verdict::Fail };
        verdict = verdict.combine(row_verdict);
        println!(
            "theta {theta:.9}: signed turning {:+.9} vs corner turn {:+.9}; lower bound {}",
            rep.signed_turning,
            rep.corner_turn,
            if rep.lower_bound_holds { "holds" } else { "FAIL (reflex corner)" }
        );
        table.push_row(vec![
            fmt_g17(theta),
            fmt_g17(radius),
            fmt_g17(rep.signed_turning),
            fmt_g17(rep.corner_turn),
            fmt_g17(residual),
            fmt_g17(rep.absolute_turning),
            rep.lower_bound_holds.to_string(),
            row_verdict.to_string(),
        ]);
        signed_series.push((theta, rep.signed_turning));
        bound_series.push((theta, -rep.absolute_turning));
    }
    table.write(&ctx.out_path("turning.csv"))?;
    SvgChart {
        title: "turning integrals of rounded corners".to_string(),
        x_label: "interior angle (rad)".to_string(),
        y_label: "integral".to_string(),
        log_x: false,
        log_y: false,
        series: vec![
            ChartSeries { name: "signed turning = pi - theta".to_string(), points: signed_series },
            ChartSeries { name: "-absolute turning".to_string(), points: bound_series },
        ],
    }
    .write(&ctx.out_path("turning.svg"))?;
    println!("turning: {verdict} ({} angles, radius {radius})", thetas.len());
    Ok(verdict)
}
