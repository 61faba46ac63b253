use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::OnceLock;

use tempfile::TempDir;

fn vidsent(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vidsent")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn files(dir: &Path, prefix: &str, ext: &str) -> Vec<String> {
    let mut v: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == ext) && p.file_name().unwrap().to_string_lossy().starts_with(prefix))
        .map(|p| p.display().to_string())
        .collect();
    v.sort();
    v
}

/// Three classes with the same participants, trained once and shared by the
/// tests below: scenes 0-5 train, 6-7 are held out.
struct Fixture {
    _dir: TempDir,
    root: PathBuf,
}

impl Fixture {
    fn bank(&self) -> String {
        self.root.join("bank").display().to_string()
    }

    fn held_out(&self) -> Vec<String> {
        files(&self.root.join("test"), "", "scene")
    }
}

fn fixture() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| {
        let dir = TempDir::new().unwrap();
        let root = dir.path().to_path_buf();
        let all = root.join("all");
        let o = vidsent(&[
            "synth",
            "--class",
            "carried",
            "--class",
            "approached",
            "--class",
            "picked",
            "--count",
            "8",
            "--noise-preset",
            "clean",
            "--seed",
            "3",
            "--out-dir",
            all.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let (train, test) = (root.join("train"), root.join("test"));
        std::fs::create_dir_all(&train).unwrap();
        std::fs::create_dir_all(&test).unwrap();
        for entry in std::fs::read_dir(&all).unwrap() {
            let p = entry.unwrap().path();
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            let held = name.contains("-0006") || name.contains("-0007");
            std::fs::rename(&p, if held { &test } else { &train }.join(&name)).unwrap();
        }
        let mut args = vec!["train".to_string(), "--out".into(), root.join("bank").display().to_string()];
        args.extend(files(&train, "", "scene"));
        let o = vidsent(&args.iter().map(String::as_str).collect::<Vec<_>>());
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        Fixture { _dir: dir, root }
    })
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let o = vidsent(&["--no-such-flag"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
}

#[test]
fn bad_config_override_is_a_usage_error() {
    assert_eq!(vidsent(&["--set", "hmm.n_states=lots", "--help-config"]).status.code(), Some(1));
    assert_eq!(vidsent(&["--set", "no.such.key=1", "--help-config"]).status.code(), Some(1));
}

#[test]
fn help_config_lists_documented_defaults() {
    let o = vidsent(&["--help-config"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for line in ["tracker.max_per_frame = 12", "tracker.otsu_bins = 50", "tracker.otsu_margin = 0.4", "codebook.size = 49"] {
        assert!(text.contains(line), "missing {line}");
    }
    assert!(text.lines().filter(|l| !l.starts_with('#')).all(|l| l.contains(" = ")));
}

#[test]
fn missing_input_is_a_data_error() {
    let o = vidsent(&["track", "/nonexistent/x.scene"]);
    assert_eq!(o.status.code(), Some(2));
    let f = fixture();
    let o = vidsent(&["describe", "--bank", "/nonexistent/bank", &f.held_out()[0]]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn describe_prints_three_tab_separated_lines_per_scene() {
    let f = fixture();
    let scene = files(&f.root.join("test"), "carried-0006", "scene");
    let o = vidsent(&["describe", "--bank", &f.bank(), &scene[0]]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3, "{text}");
    for (i, line) in lines.iter().enumerate() {
        let cols: Vec<&str> = line.split('\t').collect();
        assert_eq!(cols.len(), 4);
        assert_eq!(cols[0], "carried-0006");
        assert_eq!(cols[1], (i + 1).to_string());
        assert!(cols[3].ends_with('.'));
    }
    assert_eq!(lines[0].split('\t').nth(2), Some("carried"));
}

#[test]
fn eval_with_one_class_is_a_data_error() {
    let f = fixture();
    let carried = files(&f.root.join("test"), "carried", "scene");
    let mut args = vec!["eval", "--bank", &*f.bank()].into_iter().map(String::from).collect::<Vec<_>>();
    args.extend(carried);
    let o = vidsent(&args.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn eval_emits_roc_csv() {
    let f = fixture();
    let mut args = vec!["eval".to_string(), "--bank".into(), f.bank()];
    args.extend(f.held_out());
    let o = vidsent(&args.iter().map(String::as_str).collect::<Vec<_>>());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.starts_with("class,fpr,tpr\n"));
    assert!(text.contains("class,auc\n"));
}

#[test]
fn outputs_do_not_depend_on_jobs() {
    let f = fixture();
    let run = |jobs: &str, cmd: &str| {
        let mut args = vec!["--jobs".to_string(), jobs.into(), cmd.into(), "--bank".into(), f.bank()];
        args.extend(f.held_out());
        let o = vidsent(&args.iter().map(String::as_str).collect::<Vec<_>>());
        assert!(o.status.success());
        o.stdout
    };
    for cmd in ["classify", "describe"] {
        assert_eq!(run("1", cmd), run("4", cmd), "{cmd}");
    }
}

#[test]
fn synth_and_track_are_reproducible() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    for (d, jobs) in [(&a, "1"), (&b, "3")] {
        let o = vidsent(&[
            "--jobs",
            jobs,
            "synth",
            "--class",
            "kicked",
            "--count",
            "3",
            "--seed",
            "9",
            "--out-dir",
            d.path().to_str().unwrap(),
        ]);
        assert!(o.status.success());
    }
    for name in ["kicked-0000.scene", "kicked-0002.truth"] {
        assert_eq!(std::fs::read(a.path().join(name)).unwrap(), std::fs::read(b.path().join(name)).unwrap());
    }
    let scene = a.path().join("kicked-0001.scene");
    let first = vidsent(&["track", "--emit-raw", scene.to_str().unwrap()]);
    let second = vidsent(&["track", "--emit-raw", scene.to_str().unwrap()]);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
    let text = stdout(&first);
    assert!(text.starts_with("track 0 "));
    assert!(text.lines().any(|l| l.starts_with("raw ")));
}

#[test]
fn track_files_classify_like_their_scenes() {
    let f = fixture();
    let scene = &f.held_out()[0];
    let out = TempDir::new().unwrap();
    let o = vidsent(&["track", "--out-dir", out.path().to_str().unwrap(), scene]);
    assert!(o.status.success());
    let tracks = files(out.path(), "", "tracks");
    assert_eq!(tracks.len(), 1);
    let from_scene = stdout(&vidsent(&["classify", "--bank", &f.bank(), scene]));
    let from_tracks = stdout(&vidsent(&["classify", "--bank", &f.bank(), &tracks[0]]));
    let classes = |s: &str| s.lines().skip(1).map(|l| l.split(',').nth(2).unwrap().to_string()).collect::<Vec<_>>();
    assert_eq!(classes(&from_scene), classes(&from_tracks));
}

#[test]
fn several_scenes_without_out_dir_is_a_usage_error() {
    let f = fixture();
    let held = f.held_out();
    assert_eq!(vidsent(&["track", &held[0], &held[1]]).status.code(), Some(1));
}
