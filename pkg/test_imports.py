#!/usr/bin/env python3
"""
Smoke test that every imagedim sub-package imports and its core objects construct.
Run this before the longer suites to catch a broken install early.
"""


def test_imagedim_imports():
    """Import each sub-package and build one object from it."""
    print("🧪 Testing imagedim imports...")

    print("  Importing measures...")
    from imagedim.measures import MultinomialMeasure, moment_sum

    cascade = MultinomialMeasure(m=2, weights=(0.7, 0.3))
    assert moment_sum(cascade, 2.0, 1) > 0
    print("  ✅ Measures imported successfully")

    print("  Importing fields...")
    from imagedim.fields import FbmSpec, sample_field, unit_grid

    sample = sample_field(FbmSpec(alpha=0.5), unit_grid(16), seed=1)
    assert sample.values.shape == (16, 1)
    print("  ✅ Fields imported successfully")

    print("  Importing estimation...")
    from imagedim.estimation import estimate_dq, image_measure  # noqa: F401

    print("  ✅ Estimation imported successfully")

    print("  Importing ultrametric and tree...")
    from imagedim.tree import TreeMeasure, join_set
    from imagedim.ultrametric import UltrametricId, d_a

    assert join_set([(0, 0), (1, 0)]).total() == 1
    assert TreeMeasure.uniform(2, 2).mass((0,)) == 0.5
    assert d_a((0.1,), (0.1,), UltrametricId(m=2, j=(0,))) == 0.0
    print("  ✅ Ultrametric and tree imported successfully")

    print("  Importing experiments...")
    from imagedim.experiments import ExperimentConfig, predicted_dimension  # noqa: F401
    from imagedim.experiments.cli import build_parser

    assert build_parser().parse_args(["experiment", "--config", "x.json"]).command == "experiment"
    print("  ✅ Experiments imported successfully")


def main():
    """Run all import tests."""
    print("🚀 IMAGEDIM IMPORT TEST")
    print("=" * 50)
    try:
        test_imagedim_imports()
    except ImportError as e:
        print(f"  ❌ Import error: {e}")
        print("\n💡 Install the package first:")
        print("    pip install -e .[dev]")
        return
    print("\n" + "=" * 50)
    print("✅ ALL IMPORTS PASSED - run the suites with:")
    print("    imagedim verify-tree --config configs/tree.json")


if __name__ == "__main__":
    main()
