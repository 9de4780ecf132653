"""Static figures for run and compare reports (Agg backend, PNG files)."""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

# no timestamp or version string in the file so reruns give identical bytes
_PNG_META = {"Software": None}


def _series(trace):
    t = [r.t for r in trace]
    return {
        "t": t,
        "z": [r.p.z for r in trace],
        "z_ref": [r.p_ref.z + r.dpz for r in trace],
        "fz": [r.f_true.z for r in trace],
        "fz_est": [r.f_est.z for r in trace],
        "fx": [r.f_true.x for r in trace],
        "fy": [r.f_true.y for r in trace],
        "f_ref": [r.force_ref for r in trace],
    }


def _trigger_time(trace):
    for r in trace:
        if r.mode.value == "ForceActive":
            return r.t
    return None


def plot_run(trace, path, title=""):
    s = _series(trace)
    fig, axes = plt.subplots(4, 1, figsize=(8, 9), sharex=True)
    axes[0].plot(s["t"], s["z"], label="p_z")
    axes[0].plot(s["t"], s["z_ref"], "--", label="p_z ref + dpz")
    axes[0].set_ylabel("z (mm)")
    axes[1].plot(s["t"], s["fz"], label="F_z true")
    axes[1].plot(s["t"], s["fz_est"], alpha=0.7, label="F_z est")
    axes[1].plot(s["t"], s["f_ref"], "k:", label="F_z ref")
    axes[1].set_ylabel("F_z (N)")
    axes[2].plot(s["t"], s["fx"])
    axes[2].set_ylabel("F_x (N)")
    axes[3].plot(s["t"], s["fy"])
    axes[3].set_ylabel("F_y (N)")
    axes[3].set_xlabel("t (s)")
    t_trig = _trigger_time(trace)
    if t_trig is not None:
        for ax in axes:
            ax.axvline(t_trig, color="grey", lw=0.8, ls="--")
    axes[0].legend(loc="best", fontsize=8)
    axes[1].legend(loc="best", fontsize=8)
    if title:
        axes[0].set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=100, metadata=_PNG_META)
    plt.close(fig)


def plot_compare(position_trace, hybrid_trace, path, title=""):
    sp = _series(position_trace)
    sh = _series(hybrid_trace)
    fig, axes = plt.subplots(2, 1, figsize=(8, 6), sharex=True)
    axes[0].plot(sp["t"], sp["fz"], label="position only")
    axes[0].plot(sh["t"], sh["fz"], label="hybrid")
    axes[0].plot(sh["t"], sh["f_ref"], "k:", label="F_z ref")
    axes[0].set_ylabel("F_z (N)")
    axes[0].legend(loc="best", fontsize=8)
    axes[1].plot(sp["t"], sp["z"], label="position only")
    axes[1].plot(sh["t"], sh["z"], label="hybrid")
    axes[1].set_ylabel("p_z (mm)")
    axes[1].set_xlabel("t (s)")
    axes[1].legend(loc="best", fontsize=8)
    if title:
        axes[0].set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=100, metadata=_PNG_META)
    plt.close(fig)
