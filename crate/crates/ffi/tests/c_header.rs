use std::path::{Path, PathBuf};
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include "jtree_mcmc.h"

int main(void) {
    JmGraph *g = NULL;
    JmJunctionTree *j = NULL;
    JmSampler *s = NULL;
    uint64_t count = 0, accepted = 0;
    if (jm_graph_new(5, &g) != JM_STATUS_OK) return 1;
    if (jm_junction_tree_build(g, &j) != JM_STATUS_OK) return 2;
    if (jm_junction_tree_count(j, &count) != JM_STATUS_OK || count != 125) return 3;
    if (jm_graph_add_edge(g, 1, 1) != JM_STATUS_INVALID_GRAPH || jm_last_error_message() == NULL) return 4;
    if (jm_sampler_new(g, 3, JM_ARITY_SINGLE, JM_RULE_STANDARD, false, &s) != JM_STATUS_OK) return 5;
    if (jm_sampler_run(s, 1000, &accepted) != JM_STATUS_OK || accepted == 0) return 6;
    printf("%llu %llu\n", (unsigned long long)count, (unsigned long long)jm_sampler_sweeps(s));
    jm_sampler_free(s);
    jm_junction_tree_free(j);
    jm_graph_free(g);
    return 0;
}
"#;

/// The static library next to the test binary (`<target>/<profile>/deps`)
/// or one level up.
fn static_lib() -> Option<PathBuf> {
    let exe = std::env::current_exe().ok()?;
    let deps = exe.parent()?;
    [deps, deps.parent()?].iter().map(|d| d.join("libjtree_mcmc_ffi.a")).find(|p| p.exists())
}

fn include_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include")
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(include_dir().join("jtree_mcmc.h")).unwrap();
    for name in [
        "jm_graph_new",
        "jm_junction_tree_count",
        "jm_sampler_run",
        "jm_last_error_message",
        "JM_STATUS_NOT_DECOMPOSABLE",
        "typedef struct JmSampler JmSampler",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}

#[test]
fn c_program_links_against_the_static_library() {
    let Some(lib) = static_lib() else {
        eprintln!("skipping: static library not built");
        return;
    };
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    let exe = dir.path().join("smoke");
    std::fs::write(&src, PROGRAM).unwrap();
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-o"])
        .arg(&exe)
        .arg(&src)
        .arg("-I")
        .arg(include_dir())
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "smoke program exited with {:?}", out.status);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "125 1000");
}
