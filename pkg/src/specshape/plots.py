"""SVG contour plots of certified trial-function components.

Layout: one panel per component (cosine mode left, sine mode right), filled
contours over the centered mesh, with white circles marking the reference
ball around the vanishing point of the trial field and around its reflected
image. Output is deterministic: fixed hash salt, no timestamps.
"""

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "specshape"

import matplotlib.pyplot as plt
import numpy as np

from .geom import EUCLIDEAN, euclid_disk_of_geodesic_ball, hyp_reflect, reflect_hyperplane
from .trial import TrialField


def _vanishing_circles(cert):
    """Chart (center, radius) pairs of the reference ball around the trial zero."""
    mesh = cert.artifacts["mesh"]
    halfspace = cert.artifacts["halfspace"]
    c = np.asarray(cert.c_h, dtype=float)
    a = cert.ball_radius
    if mesh.geometry == EUCLIDEAN:
        mirrored = reflect_hyperplane(halfspace, c)
        return [(c, a), (mirrored, a)]
    first = euclid_disk_of_geodesic_ball(c, a)
    mirrored_center = hyp_reflect(halfspace, c)
    second = euclid_disk_of_geodesic_ball(mirrored_center, a)
    return [first, second]


def plot_trial_components(cert, path, levels=21):
    """Write the two-panel contour figure for a certificate to an SVG file."""
    mesh = cert.artifacts["mesh"]
    halfspace = cert.artifacts["halfspace"]
    profile = cert.artifacts["profile"]
    field = TrialField(halfspace, np.asarray(cert.c_h), profile)
    values = field.components(mesh.vertices)

    fig, axes = plt.subplots(1, 2, figsize=(9.0, 4.4))
    titles = ["cosine mode", "sine mode"]
    circles = _vanishing_circles(cert)
    for j, ax in enumerate(axes):
        ax.tricontourf(
            mesh.vertices[:, 0],
            mesh.vertices[:, 1],
            mesh.triangles,
            values[:, j],
            levels=levels,
            cmap="RdBu_r",
        )
        for center, radius in circles:
            ax.add_patch(
                plt.Circle(center, radius, fill=False, color="white", linewidth=1.2)
            )
        if mesh.geometry != EUCLIDEAN:
            ax.add_patch(
                plt.Circle((0, 0), 1.0, fill=False, color="0.4", linewidth=0.8,
                           linestyle=":")
            )
        ax.set_aspect("equal")
        ax.set_title(f"{titles[j]}  (component {j + 1})", fontsize=9)
        ax.tick_params(labelsize=7)
    fig.suptitle(
        f"{cert.name}: trial components at theta={cert.theta:.3f}, t={cert.t:.3f}",
        fontsize=10,
    )
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path
