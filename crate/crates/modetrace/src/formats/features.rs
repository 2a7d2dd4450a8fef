//! Feature CSV, one row per trip in the column order of
//! [`modetrace_core::features::FEATURE_NAMES`] after `trip_id,label`.

use modetrace_core::{FeatureVector, Mode};

use super::csvio::{field, finish, read_rows, writer};
use crate::error::FormatError;

pub const FEATURE_HEADER: &str =
    "trip_id,label,distance,time,points,vcr,mvcr,max_acceleration,avgspeed_1,minspeed,maxspeed,avgspeed_2";

pub fn write_features(rows: &[FeatureVector]) -> Result<String, FormatError> {
    let mut w = writer();
    w.write_record(FEATURE_HEADER.split(','))?;
    for f in rows {
        let mut record = vec![f.trip_id.clone(), f.label.to_string()];
        record.extend(f.values().iter().enumerate().map(|(i, v)| {
            if i == 2 {
                f.points.to_string()
            } else {
                v.to_string()
            }
        }));
        w.write_record(&record)?;
    }
    finish(w)
}

pub fn parse_features(text: &str) -> Result<Vec<FeatureVector>, FormatError> {
    read_rows(text, FEATURE_HEADER)?
        .into_iter()
        .map(|(line, row)| {
            let num = |i: usize, name: &str| -> Result<f64, FormatError> {
                let v: f64 = field(line, name, &row[i])?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(FormatError::at(line, format!("{name} must be finite")))
                }
            };
            let label: Mode = field(line, "label", &row[1])?;
            Ok(FeatureVector {
                trip_id: row[0].to_string(),
                label,
                distance: num(2, "distance")?,
                time: num(3, "time")?,
                points: field(line, "points", &row[4])?,
                vcr: num(5, "vcr")?,
                mvcr: num(6, "mvcr")?,
                max_acceleration: num(7, "max_acceleration")?,
                avgspeed_1: num(8, "avgspeed_1")?,
                minspeed: num(9, "minspeed")?,
                maxspeed: num(10, "maxspeed")?,
                avgspeed_2: num(11, "avgspeed_2")?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn header_and_round_trip() {
        let fv = FeatureVector {
            trip_id: "walk_0001".into(),
            label: Mode::Walk,
            distance: 667.1695,
            time: 180.0,
            points: 4,
            vcr: 0.75,
            mvcr: 1.0,
            max_acceleration: 0.030887,
            avgspeed_1: 3.7065,
            minspeed: 1.85,
            maxspeed: 5.55,
            avgspeed_2: 2.78,
        };
        let text = write_features(std::slice::from_ref(&fv)).unwrap();
        assert_eq!(text.lines().next(), Some(FEATURE_HEADER));
        assert_eq!(text.lines().nth(1), Some("walk_0001,walk,667.1695,180,4,0.75,1,0.030887,3.7065,1.85,5.55,2.78"));
        assert_eq!(parse_features(&text).unwrap(), vec![fv]);
        assert!(parse_features("trip_id,label\n").is_err());
    }

    proptest! {
        #[test]
        fn floats_survive_text(vals in proptest::array::uniform10(0.0f64..1e6)) {
            let fv = FeatureVector {
                trip_id: "x".into(), label: Mode::Bike,
                distance: vals[0], time: vals[1], points: 7, vcr: vals[3], mvcr: vals[4],
                max_acceleration: vals[5], avgspeed_1: vals[6], minspeed: vals[7], maxspeed: vals[8],
                avgspeed_2: vals[9],
            };
            let back = parse_features(&write_features(std::slice::from_ref(&fv)).unwrap()).unwrap();
            prop_assert_eq!(back, vec![fv]);
        }
    }
}
