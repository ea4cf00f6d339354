#!/usr/bin/env python3
"""
Example script showing how to run the CR flow checker.
"""

import subprocess
import sys


def run_check_example():
    """Run the bundled suites for both default models, then a short trace."""
    print("🚀 CR Flow Checker - Example Run")
    print("=" * 60)

    runs = [
        ("Default model, alpha=1, all suites", [
            "check", "--config", "configs/suite_default.json",
        ]),
        ("Default model, alpha=0, all suites", [
            "check", "--config", "configs/suite_alpha0.json",
        ]),
        ("Mismatched field alpha (expected to fail)", [
            "check", "--config", "configs/mismatch_suite.json",
        ]),
        ("Trace of one point under the flow", [
            "trace", "--config", "configs/default_alpha1.json",
            "--z2", "0.05+0.02i", "--t0", "0.1", "--times", "0:1:0.1", "--out", "reports/trace.csv",
        ]),
    ]

    for title, args in runs:
        print(f"\n📊 {title}...")
        cmd = [sys.executable, "cr_flow_check.py", *args]
        try:
            result = subprocess.run(cmd, capture_output=True, text=True)
            print("STDOUT:")
            print(result.stdout)
            if result.stderr:
                print("STDERR:")
                print(result.stderr)
            print(f"Return code: {result.returncode}")
        except OSError as e:
            print(f"Error running check: {e}")

    print("\n" + "=" * 60)
    print("✅ Example completed!")
    print("Check the 'reports/' directory for JSON reports and the trace CSV.")


if __name__ == "__main__":
    run_check_example()
