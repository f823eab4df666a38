use std::fmt::Write;

use crate::verify::RunReport;

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or("-".into(), |x| format!("{x:.4e}"))
}

/// Markdown summary: constants, criteria with margins, run statistics.
pub fn render_markdown(r: &RunReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# Run summary: {}\n", r.scenario.name);
    let _ = writeln!(s, "- overall: **{}**", r.overall.label());
    let _ = writeln!(s, "- equilibrium: {:?}", r.equilibrium);
    let _ = writeln!(s, "- steps: {} accepted, {} rejected", r.accepted_steps, r.rejected_steps);
    let drift: Vec<String> =
        r.conserved_labels.iter().zip(&r.conservation_drift).map(|(l, d)| format!("{l} {d:.3e}")).collect();
    let _ = writeln!(s, "- conservation drift: {}", drift.join(", "));
    let _ = writeln!(s, "- entropy increases: {}", r.entropy_increases);
    let _ = writeln!(s, "- generator: {} (seed {})", r.rng, r.scenario.init.seed);
    let cert_rate = r.certificate.bundle.rate();
    let fitted = r.fitted_rate.as_ref().map(|f| f.lambda);
    let _ = writeln!(
        s,
        "- certified rate {:.4e}, fitted rate {}, observed/certified {}\n",
        cert_rate,
        fmt_opt(fitted),
        fmt_opt(fitted.map(|l| l / cert_rate))
    );

    let _ = writeln!(s, "## Constants\n");
    let _ = writeln!(s, "| constant | value |\n|---|---|");
    for (name, v) in r.certificate.bundle.labeled() {
        let _ = writeln!(s, "| {name} | {v:.6e} |");
    }
    let p = &r.certificate.provenance;
    let _ = writeln!(
        s,
        "\nC_LSI = {:.6} ({}), C_P = {:.6} ({})",
        r.certificate.functional.c_lsi,
        r.certificate.functional.c_lsi_source,
        r.certificate.functional.c_p,
        r.certificate.functional.c_p_source
    );
    if let Some(w) = &r.certificate.functional.warning {
        let _ = writeln!(s, "\nwarning: {w}");
    }
    if let (Some(e), Some(rule)) = (p.eps_sq, &p.eps_rule) {
        let _ =
            writeln!(s, "\neps^2 = {e:.6e} ({rule}); T_eps = {}", p.t_eps.map_or("never".into(), |t| format!("{t}")));
    }
    if let (Some(k), Some(rule)) = (p.k_bound, &p.k_rule) {
        let _ = writeln!(s, "\nk = {k:.6} ({rule})");
    }

    let _ = writeln!(s, "\n## Checks\n");
    let _ = writeln!(s, "| # | check | verdict | margin | detail |\n|---|---|---|---|---|");
    for c in &r.criteria {
        let _ = writeln!(
            s,
            "| {} | {} | {} | {} | {} |",
            c.id,
            c.name,
            c.verdict.label(),
            fmt_opt(c.margin),
            c.detail.replace('|', "/")
        );
    }
    s
}
