"""Dynamic mode decomposition ROI delineation for image sequences."""

from ._core import (  # noqa: F401
    CompanionResult,
    DmdResult,
    Error,
    bounding_box_baseline,
    companion_dmd,
    data_matrix,
    default_phantom_spec,
    delineate,
    dice_coefficient,
    evaluate,
    gaussian_kernel,
    generate_phantom,
    kidney_curve,
    label_components,
    liver_curve,
    load_stack,
    mode_magnitude,
    normalize_curve,
    otsu_threshold,
    rmse,
    roi_mean_curve,
    run_dmd,
    run_dmd_stack,
    save_stack,
)


def phantom_spec(overrides=None, **fields):
    """key=value phantom text overriding the defaults.

    Dotted keys such as ``kidney.center_col`` go in ``overrides``; plain keys
    may also be passed as keyword arguments.
    """
    items = dict(overrides or {})
    items.update(fields)
    return "".join(f"{k}={v}\n" for k, v in items.items())


__version__ = "0.1.0"
