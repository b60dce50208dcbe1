//! Classic EDF (16-bit) reader and a matching writer.
//!
//! Only plain signal payloads are handled; EDF+ annotation channels are
//! skipped, not parsed.

use std::fs;
use std::io::Write;
use std::path::Path;

use chrono::{NaiveDate, NaiveDateTime, NaiveTime};

use crate::error::{Error, Result};
use crate::ingest::Recording;

const FIXED_HEADER_LEN: usize = 256;
const PER_SIGNAL_HEADER_LEN: usize = 256;

struct SignalHeader {
    label: String,
    physical_dimension: String,
    physical_min: f64,
    physical_max: f64,
    digital_min: i32,
    digital_max: i32,
    samples_per_record: usize,
}

impl SignalHeader {
    fn is_annotation(&self) -> bool {
        self.label.starts_with("EDF Annotations") || self.label.starts_with("BDF Annotations")
    }

    /// Multiplier that converts this signal's physical unit to volts.
    fn unit_scale(&self) -> f64 {
        match self.physical_dimension.as_str() {
            "uV" | "µV" | "uv" => 1e-6,
            "mV" | "mv" => 1e-3,
            "V" | "v" => 1.0,
            _ => 1.0,
        }
    }
}

fn field<'a>(bytes: &'a [u8], offset: usize, len: usize) -> Result<&'a str> {
    let end = offset + len;
    if end > bytes.len() {
        return Err(Error::EdfParse {
            offset: bytes.len() as u64,
            message: format!("file ends inside header field at [{offset}, {end})"),
        });
    }
    std::str::from_utf8(&bytes[offset..end]).map_err(|_| Error::EdfParse {
        offset: offset as u64,
        message: "header field is not ASCII".into(),
    })
}

fn parse_int(bytes: &[u8], offset: usize, len: usize, what: &str) -> Result<i64> {
    let s = field(bytes, offset, len)?.trim();
    s.parse().map_err(|_| Error::EdfParse {
        offset: offset as u64,
        message: format!("{what}: expected integer, got '{s}'"),
    })
}

fn parse_float(bytes: &[u8], offset: usize, len: usize, what: &str) -> Result<f64> {
    let s = field(bytes, offset, len)?.trim();
    s.parse().map_err(|_| Error::EdfParse {
        offset: offset as u64,
        message: format!("{what}: expected number, got '{s}'"),
    })
}

/// Parse `dd.mm.yy` + `hh.mm.ss` into seconds since the Unix epoch,
/// using the EDF year pivot (85-99 -> 1985-1999, else 2000+).
fn parse_start_time(date: &str, time: &str) -> Option<f64> {
    let mut dp = date.trim().split('.');
    let (d, m, y) = (dp.next()?, dp.next()?, dp.next()?);
    let yy: i32 = y.parse().ok()?;
    let year = if yy >= 85 { 1900 + yy } else { 2000 + yy };
    let date = NaiveDate::from_ymd_opt(year, m.parse().ok()?, d.parse().ok()?)?;

    let mut tp = time.trim().split('.');
    let time = NaiveTime::from_hms_opt(
        tp.next()?.parse().ok()?,
        tp.next()?.parse().ok()?,
        tp.next()?.parse().ok()?,
    )?;
    let dt = NaiveDateTime::new(date, time);
    Some(dt.and_utc().timestamp() as f64)
}

/// Read a classic EDF file into a [`Recording`] with samples in volts.
///
/// Digital values are mapped through each signal's physical/digital
/// calibration line; annotation channels are excluded.
pub fn read_edf(path: impl AsRef<Path>) -> Result<Recording> {
    let bytes = fs::read(path.as_ref())?;
    if bytes.len() < FIXED_HEADER_LEN {
        return Err(Error::EdfParse {
            offset: bytes.len() as u64,
            message: format!(
                "file is {} bytes, EDF fixed header needs {FIXED_HEADER_LEN}",
                bytes.len()
            ),
        });
    }

    let version = field(&bytes, 0, 8)?.trim();
    if version != "0" {
        return Err(Error::EdfParse {
            offset: 0,
            message: format!("unsupported EDF version field '{version}'"),
        });
    }

    let start_date = field(&bytes, 168, 8)?.to_string();
    let start_clock = field(&bytes, 176, 8)?.to_string();
    let header_bytes = parse_int(&bytes, 184, 8, "header byte count")? as usize;
    let declared_records = parse_int(&bytes, 236, 8, "number of data records")?;
    let record_duration = parse_float(&bytes, 244, 8, "data record duration")?;
    let n_signals = parse_int(&bytes, 252, 4, "signal count")?;

    if n_signals <= 0 {
        return Err(Error::EdfParse {
            offset: 252,
            message: format!("signal count must be positive, got {n_signals}"),
        });
    }
    let ns = n_signals as usize;
    let expected_header = FIXED_HEADER_LEN + ns * PER_SIGNAL_HEADER_LEN;
    if header_bytes != expected_header {
        return Err(Error::EdfParse {
            offset: 184,
            message: format!(
                "header byte count {header_bytes} does not match 256 + {ns} * 256 = {expected_header}"
            ),
        });
    }
    if bytes.len() < expected_header {
        return Err(Error::EdfParse {
            offset: bytes.len() as u64,
            message: format!(
                "file is {} bytes, header needs {expected_header}",
                bytes.len()
            ),
        });
    }
    if !(record_duration > 0.0) {
        return Err(Error::EdfParse {
            offset: 244,
            message: format!("data record duration must be positive, got {record_duration}"),
        });
    }

    // Signal headers are stored field-major: all labels, then all
    // transducers, and so on.
    let base = FIXED_HEADER_LEN;
    let mut signals = Vec::with_capacity(ns);
    for i in 0..ns {
        let label = field(&bytes, base + i * 16, 16)?.trim().to_string();
        let dim_off = base + ns * (16 + 80) + i * 8;
        let physical_dimension = field(&bytes, dim_off, 8)?.trim().to_string();
        let pmin_off = base + ns * (16 + 80 + 8) + i * 8;
        let physical_min = parse_float(&bytes, pmin_off, 8, "physical minimum")?;
        let pmax_off = base + ns * (16 + 80 + 16) + i * 8;
        let physical_max = parse_float(&bytes, pmax_off, 8, "physical maximum")?;
        let dmin_off = base + ns * (16 + 80 + 24) + i * 8;
        let digital_min = parse_int(&bytes, dmin_off, 8, "digital minimum")? as i32;
        let dmax_off = base + ns * (16 + 80 + 32) + i * 8;
        let digital_max = parse_int(&bytes, dmax_off, 8, "digital maximum")? as i32;
        let spr_off = base + ns * (16 + 80 + 40 + 80) + i * 8;
        let samples_per_record = parse_int(&bytes, spr_off, 8, "samples per record")?;
        if samples_per_record <= 0 {
            return Err(Error::EdfParse {
                offset: spr_off as u64,
                message: format!("samples per record must be positive, got {samples_per_record}"),
            });
        }
        if digital_min == digital_max {
            return Err(Error::EdfParse {
                offset: dmin_off as u64,
                message: format!("digital range is empty ({digital_min})"),
            });
        }
        signals.push(SignalHeader {
            label,
            physical_dimension,
            physical_min,
            physical_max,
            digital_min,
            digital_max,
            samples_per_record: samples_per_record as usize,
        });
    }

    for sig in &signals {
        if !sig.is_annotation() && sig.physical_min == sig.physical_max {
            return Err(Error::EdfCalibration {
                label: sig.label.clone(),
                value: sig.physical_min,
            });
        }
    }

    let record_len_bytes: usize = signals.iter().map(|s| s.samples_per_record * 2).sum();
    let payload = bytes.len() - expected_header;
    let found_records = (payload / record_len_bytes) as i64;
    let n_records = if declared_records < 0 {
        // Unknown record count: infer from the payload size.
        if payload % record_len_bytes != 0 {
            return Err(Error::EdfTruncated {
                expected: found_records + 1,
                found: found_records,
            });
        }
        found_records
    } else {
        if found_records < declared_records {
            return Err(Error::EdfTruncated {
                expected: declared_records,
                found: found_records,
            });
        }
        declared_records
    };

    let kept: Vec<usize> = (0..ns).filter(|&i| !signals[i].is_annotation()).collect();
    if kept.is_empty() {
        return Err(Error::InvalidRecording(
            "EDF file contains no data signals".into(),
        ));
    }
    let spr0 = signals[kept[0]].samples_per_record;
    if kept.iter().any(|&i| signals[i].samples_per_record != spr0) {
        return Err(Error::InvalidRecording(
            "signals have mixed sampling rates; unsupported".into(),
        ));
    }
    let sampling_rate = spr0 as f64 / record_duration;

    let mut samples: Vec<Vec<f64>> = kept
        .iter()
        .map(|_| Vec::with_capacity(n_records as usize * spr0))
        .collect();
    let mut offset = expected_header;
    for _ in 0..n_records {
        for (sig_idx, sig) in signals.iter().enumerate() {
            let n_bytes = sig.samples_per_record * 2;
            if let Some(out_idx) = kept.iter().position(|&k| k == sig_idx) {
                let scale = (sig.physical_max - sig.physical_min)
                    / (sig.digital_max - sig.digital_min) as f64;
                let unit = sig.unit_scale();
                let out = &mut samples[out_idx];
                for s in 0..sig.samples_per_record {
                    let lo = bytes[offset + 2 * s];
                    let hi = bytes[offset + 2 * s + 1];
                    let digital = i16::from_le_bytes([lo, hi]) as f64;
                    let physical = (digital - sig.digital_min as f64) * scale + sig.physical_min;
                    out.push(physical * unit);
                }
            }
            offset += n_bytes;
        }
    }

    let labels = kept.iter().map(|&i| signals[i].label.clone()).collect();
    let start_time = parse_start_time(&start_date, &start_clock);
    Recording::new(labels, sampling_rate, samples, start_time)
}

fn pad_field(out: &mut Vec<u8>, text: &str, len: usize) {
    let mut bytes = text.as_bytes().to_vec();
    bytes.truncate(len);
    bytes.resize(len, b' ');
    out.extend_from_slice(&bytes);
}

/// Write a [`Recording`] as classic EDF with 1-second data records.
///
/// Each channel is calibrated to a symmetric physical range in whole
/// microvolts covering its peak amplitude. The sampling rate must be a
/// whole number and the duration a whole number of seconds.
pub fn write_edf(rec: &Recording, path: impl AsRef<Path>) -> Result<()> {
    let fs = rec.sampling_rate();
    if fs.fract() != 0.0 {
        return Err(Error::InvalidRecording(format!(
            "EDF writer needs an integer sampling rate, got {fs}"
        )));
    }
    let spr = fs as usize;
    let n = rec.n_samples();
    if n == 0 || n % spr != 0 {
        return Err(Error::InvalidRecording(format!(
            "EDF writer needs a whole number of 1 s records; {n} samples at {fs} Hz"
        )));
    }
    let n_records = n / spr;
    let ns = rec.n_channels();

    // Per-channel symmetric calibration in whole microvolts.
    let amps: Vec<f64> = rec
        .samples()
        .iter()
        .map(|ch| {
            let peak_uv = ch.iter().fold(0.0f64, |a, &x| a.max(x.abs())) * 1e6;
            peak_uv.ceil().max(1.0)
        })
        .collect();

    let mut out = Vec::with_capacity(256 * (1 + ns) + n_records * ns * spr * 2);
    pad_field(&mut out, "0", 8);
    pad_field(&mut out, "X X X X", 80);
    pad_field(&mut out, "Startdate X X X X", 80);
    pad_field(&mut out, "01.01.00", 8);
    pad_field(&mut out, "00.00.00", 8);
    pad_field(&mut out, &format!("{}", 256 * (1 + ns)), 8);
    pad_field(&mut out, "", 44);
    pad_field(&mut out, &format!("{n_records}"), 8);
    pad_field(&mut out, "1", 8);
    pad_field(&mut out, &format!("{ns}"), 4);

    for label in rec.channel_labels() {
        pad_field(&mut out, label, 16);
    }
    for _ in 0..ns {
        pad_field(&mut out, "", 80); // transducer
    }
    for _ in 0..ns {
        pad_field(&mut out, "uV", 8);
    }
    for amp in &amps {
        pad_field(&mut out, &format!("-{amp}"), 8);
    }
    for amp in &amps {
        pad_field(&mut out, &format!("{amp}"), 8);
    }
    for _ in 0..ns {
        pad_field(&mut out, "-32767", 8);
    }
    for _ in 0..ns {
        pad_field(&mut out, "32767", 8);
    }
    for _ in 0..ns {
        pad_field(&mut out, "", 80); // prefiltering
    }
    for _ in 0..ns {
        pad_field(&mut out, &format!("{spr}"), 8);
    }
    for _ in 0..ns {
        pad_field(&mut out, "", 32);
    }

    for r in 0..n_records {
        for (ch, amp) in rec.samples().iter().zip(&amps) {
            for s in 0..spr {
                let uv = ch[r * spr + s] * 1e6;
                let digital = (uv / amp * 32767.0).round().clamp(-32767.0, 32767.0) as i16;
                out.extend_from_slice(&digital.to_le_bytes());
            }
        }
    }

    let mut file = fs::File::create(path.as_ref())?;
    file.write_all(&out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Hand-build a minimal classic EDF file.
    fn build_edf(
        labels: &[&str],
        n_records: usize,
        declared_records: i64,
        spr: usize,
        digital_fill: i16,
    ) -> Vec<u8> {
        let ns = labels.len();
        let mut out = Vec::new();
        pad_field(&mut out, "0", 8);
        pad_field(&mut out, "patient", 80);
        pad_field(&mut out, "recording", 80);
        pad_field(&mut out, "02.03.21", 8);
        pad_field(&mut out, "10.15.30", 8);
        pad_field(&mut out, &format!("{}", 256 * (1 + ns)), 8);
        pad_field(&mut out, "", 44);
        pad_field(&mut out, &format!("{declared_records}"), 8);
        pad_field(&mut out, "1", 8);
        pad_field(&mut out, &format!("{ns}"), 4);
        for l in labels {
            pad_field(&mut out, l, 16);
        }
        for _ in 0..ns {
            pad_field(&mut out, "", 80);
        }
        for _ in 0..ns {
            pad_field(&mut out, "uV", 8);
        }
        for _ in 0..ns {
            pad_field(&mut out, "-100", 8);
        }
        for _ in 0..ns {
            pad_field(&mut out, "100", 8);
        }
        for _ in 0..ns {
            pad_field(&mut out, "-32768", 8);
        }
        for _ in 0..ns {
            pad_field(&mut out, "32767", 8);
        }
        for _ in 0..ns {
            pad_field(&mut out, "", 80);
        }
        for _ in 0..ns {
            pad_field(&mut out, &format!("{spr}"), 8);
        }
        for _ in 0..ns {
            pad_field(&mut out, "", 32);
        }
        for _ in 0..n_records {
            for _ in 0..ns {
                for _ in 0..spr {
                    out.extend_from_slice(&digital_fill.to_le_bytes());
                }
            }
        }
        out
    }

    fn write_temp(bytes: &[u8]) -> tempfile::NamedTempFile {
        let f = tempfile::NamedTempFile::new().unwrap();
        fs::write(f.path(), bytes).unwrap();
        f
    }

    #[test]
    fn minimal_file_applies_the_calibration_map() {
        // Digital 0 in [-32768, 32767] mapped to [-100, 100] uV:
        // (0 - (-32768)) * 200/65535 + (-100) uV, in volts.
        let f = write_temp(&build_edf(&["AF3"], 1, 1, 256, 0));
        let rec = read_edf(f.path()).unwrap();
        assert_eq!(rec.n_channels(), 1);
        assert_eq!(rec.n_samples(), 256);
        assert_eq!(rec.sampling_rate(), 256.0);
        let expected = (32768.0 * 200.0 / 65535.0 - 100.0) * 1e-6;
        for &v in rec.samples()[0].iter() {
            assert!((v - expected).abs() < 1e-18, "{v} != {expected}");
        }
    }

    #[test]
    fn declared_metadata_is_passed_through() {
        let f = write_temp(&build_edf(&["AF3", "AF4", "F3"], 2, 2, 128, 5));
        let rec = read_edf(f.path()).unwrap();
        assert_eq!(
            rec.channel_labels(),
            &["AF3".to_string(), "AF4".to_string(), "F3".to_string()]
        );
        assert_eq!(rec.sampling_rate(), 128.0);
        assert!(rec.samples().iter().all(|ch| ch.len() == 256));
        // 02.03.21 10:15:30 UTC
        assert_eq!(rec.start_time(), Some(1614680130.0));
    }

    #[test]
    fn truncated_file_names_expected_and_found_counts() {
        let bytes = build_edf(&["AF3"], 6, 10, 256, 0);
        let f = write_temp(&bytes);
        match read_edf(f.path()) {
            Err(Error::EdfTruncated { expected, found }) => {
                assert_eq!(expected, 10);
                assert_eq!(found, 6);
            }
            other => panic!("expected truncation error, got {other:?}"),
        }
    }

    #[test]
    fn flat_calibration_is_rejected() {
        let mut bytes = build_edf(&["AF3"], 1, 1, 256, 0);
        // Overwrite physical min/max with the same value.
        let base = 256;
        let pmin_off = base + 16 + 80 + 8;
        bytes[pmin_off..pmin_off + 8].copy_from_slice(b"50      ");
        let pmax_off = base + 16 + 80 + 16;
        bytes[pmax_off..pmax_off + 8].copy_from_slice(b"50      ");
        let f = write_temp(&bytes);
        assert!(matches!(
            read_edf(f.path()),
            Err(Error::EdfCalibration { .. })
        ));
    }

    #[test]
    fn garbage_header_reports_byte_offset() {
        let mut bytes = build_edf(&["AF3"], 1, 1, 256, 0);
        bytes[236..244].copy_from_slice(b"oops    ");
        let f = write_temp(&bytes);
        match read_edf(f.path()) {
            Err(Error::EdfParse { offset, .. }) => assert_eq!(offset, 236),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn annotation_signals_are_excluded() {
        let f = write_temp(&build_edf(&["AF3", "EDF Annotations"], 1, 1, 64, 3));
        let rec = read_edf(f.path()).unwrap();
        assert_eq!(rec.channel_labels(), &["AF3".to_string()]);
    }

    #[test]
    fn roundtrip_stays_within_one_quantization_step() {
        let fs = 256.0;
        let n = 512;
        let samples: Vec<Vec<f64>> = (0..3)
            .map(|c| {
                (0..n)
                    .map(|i| {
                        let t = i as f64 / fs;
                        (40e-6 + c as f64 * 10e-6)
                            * (2.0 * std::f64::consts::PI * (5.0 + c as f64) * t).sin()
                    })
                    .collect()
            })
            .collect();
        let rec = Recording::new(
            vec!["AF3".into(), "AF4".into(), "F3".into()],
            fs,
            samples,
            None,
        )
        .unwrap();

        let f = tempfile::NamedTempFile::new().unwrap();
        write_edf(&rec, f.path()).unwrap();
        let back = read_edf(f.path()).unwrap();

        assert_eq!(back.n_samples(), rec.n_samples());
        for (a, b) in rec.samples().iter().zip(back.samples()) {
            let amp_volts = (a.iter().fold(0.0f64, |m, &x| m.max(x.abs())) * 1e6).ceil() * 1e-6;
            let step = amp_volts.max(1e-6) / 32767.0;
            for (&x, &y) in a.iter().zip(b) {
                assert!((x - y).abs() <= step, "{x} vs {y}, step {step}");
            }
        }
    }
}
