"""Central styling constants; bump STYLE_VERSION on any visual change."""

STYLE_VERSION = "1"

# distribution panels: final curve full blue, smoothed curve dashed green
FINAL_LINE = {"color": "tab:blue", "linestyle": "-", "linewidth": 1.2}
SMOOTH_LINE = {"color": "tab:green", "linestyle": "--", "linewidth": 1.2}

# simulation markers on the sequence/sweep panels
SIM_MARKER = {"color": "tab:red", "marker": "o", "linestyle": "-", "markersize": 5}
ALT_MARKER = {"color": "tab:blue", "marker": "s", "linestyle": "--", "markersize": 4}

FIGSIZE = (6.0, 4.0)
DPI = 150
