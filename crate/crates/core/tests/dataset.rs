use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::Command;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use robust_cluster::dataset::{ingest_letters, read_letters};
use robust_cluster::OUTLIER;

/// Letter-recognition shaped file: each class gets its own feature profile.
fn synthetic_letters(path: &Path, counts: &[(char, usize)]) {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut f = fs::File::create(path).unwrap();
    for &(letter, count) in counts {
        let base = (letter as u8 - b'A') as i64 % 12;
        for _ in 0..count {
            let features: Vec<String> = (0..16)
                .map(|j| {
                    let v = base + (j % 3) as i64 + rng.random_range(-1..=1);
                    v.clamp(0, 15).to_string()
                })
                .collect();
            writeln!(f, "{letter},{}", features.join(",")).unwrap();
        }
    }
}

#[test]
fn letters_sample_masks_the_outlier_class() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("letters.data");
    synthetic_letters(&path, &[('W', 130), ('V', 110), ('R', 25), ('B', 40)]);
    assert_eq!(read_letters(&path).unwrap().len(), 305);

    let s = ingest_letters(&path, &['W', 'V'], 100, Some('R'), 20, 5).unwrap();
    assert_eq!(s.dataset.points.n(), 220);
    assert_eq!(s.dataset.points.d(), 16);
    assert_eq!(s.keep_mask.iter().filter(|&&k| k).count(), 200);
    let truth = s.dataset.truth.as_ref().unwrap();
    assert_eq!(
        truth.as_slice().iter().filter(|&&l| l == OUTLIER).count(),
        20
    );
    assert_eq!(truth.counts(), vec![100, 100]);

    let again = ingest_letters(&path, &['W', 'V'], 100, Some('R'), 20, 5).unwrap();
    assert_eq!(again.dataset.points, s.dataset.points);
}

#[test]
fn letters_sample_needs_enough_rows() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("letters.data");
    synthetic_letters(&path, &[('W', 130), ('V', 50)]);
    let err = ingest_letters(&path, &['W', 'V'], 100, None, 0, 1).unwrap_err();
    assert!(err.to_string().contains("class V"), "{err}");
}

#[test]
fn letters_rows_are_validated() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.data");
    fs::write(&path, "A,1,2,3\n").unwrap();
    assert!(read_letters(&path).unwrap_err().to_string().contains(":1:"));
    fs::write(&path, "a,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1\n").unwrap();
    assert!(read_letters(&path).is_err());
    fs::write(&path, "A,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,16\n").unwrap();
    assert!(read_letters(&path).is_err());
}

#[test]
fn letters_table_runs_on_a_local_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("letters.data");
    synthetic_letters(
        &path,
        &[
            ('W', 120),
            ('V', 120),
            ('X', 120),
            ('M', 120),
            ('A', 120),
            ('R', 40),
        ],
    );
    let out = dir.path().join("reports");
    let o = Command::new(env!("CARGO_BIN_EXE_robust-cluster"))
        .args([
            "table",
            "letters",
            "--reps",
            "2",
            "--threads",
            "1",
            "--data",
        ])
        .arg(&path)
        .arg("-o")
        .arg(&out)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("table_letters.csv")).unwrap();
    assert!(csv.lines().count() > 1);
}
