//! CSV report generation.
//!
//! Every table carries a header row and uses RFC-4180 quoting. Numeric
//! fields are printed with fixed precision so identical runs produce
//! byte-identical files.

use fsonet_core::analysis::{
    AvailabilityReport, BufferSimulation, CorrelationMatrix, ThroughputSummary,
};
use fsonet_core::passes::Pass;
use fsonet_core::weather::WeatherSeries;

/// Quote a field per RFC 4180 when it contains a comma, quote, or newline.
pub fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') || s.contains('\r') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn row(fields: &[String]) -> String {
    let quoted: Vec<String> = fields.iter().map(|f| csv_field(f)).collect();
    let mut line = quoted.join(",");
    line.push('\n');
    line
}

fn opt(value: Option<f64>, precision: usize) -> String {
    match value {
        Some(v) => format!("{v:.precision$}"),
        None => String::new(),
    }
}

pub fn passes_csv(passes: &[Pass]) -> String {
    let mut out = String::from("station_id,aos_iso8601,los_iso8601,duration_s,max_elevation_deg\n");
    for p in passes {
        out.push_str(&row(&[
            p.station_id.clone(),
            p.aos.format_iso8601(),
            p.los.format_iso8601(),
            format!("{:.0}", p.duration_s),
            format!("{:.3}", p.max_elevation_deg),
        ]));
    }
    out
}

pub fn weather_stats_csv(series: &[WeatherSeries]) -> String {
    let mut out = String::from("station_id,samples,mean_cloud_fraction,cn2\n");
    for s in series {
        let mean = if s.samples.is_empty() {
            None
        } else {
            Some(s.samples.iter().map(|x| x.cloud_fraction).sum::<f64>() / s.samples.len() as f64)
        };
        let cn2 = s.samples.first().and_then(|x| x.cn2);
        out.push_str(&row(&[
            s.station_id.clone(),
            s.samples.len().to_string(),
            opt(mean, 6),
            match cn2 {
                Some(v) => format!("{v:e}"),
                None => String::new(),
            },
        ]));
    }
    out
}

pub fn synth_weather_csv(series: &[WeatherSeries]) -> String {
    let mut out = String::from("station_id,timestamp,cloud_fraction\n");
    for s in series {
        for sample in &s.samples {
            out.push_str(&row(&[
                s.station_id.clone(),
                sample.time.format_iso8601(),
                format!("{:.6}", sample.cloud_fraction),
            ]));
        }
    }
    out
}

pub fn availability_monthly_csv(report: &AvailabilityReport) -> String {
    let mut out = String::from("year_month,availability_pct\n");
    for (month, pct) in &report.monthly {
        out.push_str(&row(&[month.to_string(), format!("{pct:.4}")]));
    }
    out
}

pub fn throughput_monthly_csv(summary: &ThroughputSummary) -> String {
    let mut out = String::from("year_month,gbits\n");
    for (month, bits) in &summary.per_month {
        out.push_str(&row(&[month.to_string(), format!("{:.6}", bits / 1e9)]));
    }
    out
}

pub fn per_pass_csv(summary: &ThroughputSummary) -> String {
    let mut out = String::from("pass_id,station,c_i_bps,bits\n");
    for p in &summary.per_pass {
        out.push_str(&row(&[
            p.pass_id.to_string(),
            p.station_id.clone(),
            format!("{:.3}", p.mean_rate_bps),
            format!("{:.0}", p.bits),
        ]));
    }
    out
}

pub fn linkbudget_csv(summary: &ThroughputSummary) -> String {
    let mut out = String::from(
        "pass_id,station,timestamp,elevation_deg,slant_range_m,fspl_db,gain_tx_db,gain_rx_db,\
         pointing_loss_db,atmospheric_loss_db,cloud_loss_db,turbulence_loss_db,received_power_dbw,\
         snr_db,capacity_bps,rate_bps,credited\n",
    );
    for p in &summary.per_pass {
        for s in &p.samples {
            out.push_str(&row(&[
                p.pass_id.to_string(),
                p.station_id.clone(),
                s.time.format_iso8601(),
                format!("{:.4}", s.elevation_deg),
                format!("{:.1}", s.slant_range_m),
                format!("{:.4}", s.link.fspl_db),
                format!("{:.4}", s.link.gain_tx_db),
                format!("{:.4}", s.link.gain_rx_db),
                format!("{:.4}", s.link.pointing_loss_db),
                format!("{:.4}", s.link.atmospheric_loss_db),
                opt(s.link.cloud_loss_db, 4),
                format!("{:.4}", s.link.turbulence_loss_db),
                opt(s.link.received_power_dbw, 4),
                opt(s.link.snr_db, 4),
                format!("{:.3}", s.link.capacity_bps),
                format!("{:.3}", s.rate_bps),
                (s.credited as u8).to_string(),
            ]));
        }
    }
    out
}

pub fn buffer_csv(sim: &BufferSimulation) -> String {
    let mut out = String::from("timestamp,fill_bits,lost_total_bits\n");
    for p in &sim.points {
        out.push_str(&row(&[
            p.time.format_iso8601(),
            p.fill_bits.to_string(),
            p.lost_bits.to_string(),
        ]));
    }
    out
}

pub fn correlation_csv(matrix: &CorrelationMatrix) -> String {
    let mut header = vec!["station".to_string()];
    header.extend(matrix.station_ids.iter().cloned());
    let mut out = row(&header);
    for (i, id) in matrix.station_ids.iter().enumerate() {
        let mut fields = vec![id.clone()];
        for j in 0..matrix.station_ids.len() {
            fields.push(opt(matrix.r[i][j], 6));
        }
        out.push_str(&row(&fields));
    }
    out
}

/// One sweep summary row per configuration.
pub struct SummaryRow {
    pub configuration: String,
    pub a_overall_pct: Option<f64>,
    pub t_gbits: f64,
    pub pdt_pct: Option<f64>,
}

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::from("configuration,a_overall_pct,t_gbits,pdt_pct,outage_pct\n");
    for r in rows {
        out.push_str(&row(&[
            r.configuration.clone(),
            opt(r.a_overall_pct, 4),
            format!("{:.6}", r.t_gbits),
            opt(r.pdt_pct, 4),
            opt(r.a_overall_pct.map(|a| 100.0 - a), 4),
        ]));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fields_with_commas_and_quotes_are_quoted() {
        assert_eq!(csv_field("plain"), "plain");
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    }

    #[test]
    fn summary_has_header_and_outage_complement() {
        let csv = summary_csv(&[SummaryRow {
            configuration: "config1".into(),
            a_overall_pct: Some(84.0),
            t_gbits: 1000.0,
            pdt_pct: Some(0.1),
        }]);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "configuration,a_overall_pct,t_gbits,pdt_pct,outage_pct"
        );
        assert_eq!(
            lines.next().unwrap(),
            "config1,84.0000,1000.000000,0.1000,16.0000"
        );
    }

    #[test]
    fn absent_values_are_empty_fields() {
        let csv = summary_csv(&[SummaryRow {
            configuration: "x".into(),
            a_overall_pct: None,
            t_gbits: 0.0,
            pdt_pct: None,
        }]);
        assert!(csv.lines().nth(1).unwrap().contains(",,"));
    }
}
