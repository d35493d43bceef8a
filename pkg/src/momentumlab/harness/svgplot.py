"""Minimal standalone SVG 1.1 line charts (log-scale y), no plotting deps."""

import math

_WIDTH, _HEIGHT = 840, 520
_ML, _MR, _MT, _MB = 78, 24, 46, 56


def _nice_ticks(lo, hi, target=6):
    span = hi - lo
    if span <= 0:
        return [lo]
    raw = span / target
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 5.0, 10.0):
        if raw <= mult * mag:
            step = mult * mag
            break
    first = math.ceil(lo / step) * step
    ticks = []
    v = first
    while v <= hi + 1e-12 * span:
        ticks.append(v)
        v += step
    return ticks


def svg_line_chart(title, xlabel, ylabel, series, log_y=True):
    """Render one chart to SVG text.

    ``series`` is a list of dicts with keys label, x, y, color and an
    optional dashed flag.  Non-positive y values are clipped to the
    smallest positive value in view when log_y is set.
    """
    xs_all = [float(x) for s in series for x in s["x"]]
    ys_pos = [float(y) for s in series for y in s["y"] if float(y) > 0.0]
    if not xs_all or not ys_pos:
        raise ValueError("nothing to plot")
    x_lo, x_hi = min(xs_all), max(xs_all)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if log_y:
        y_lo = math.floor(math.log10(min(ys_pos)))
        y_hi = math.ceil(math.log10(max(ys_pos)))
        if y_hi == y_lo:
            y_hi = y_lo + 1
    else:
        y_lo, y_hi = min(ys_pos), max(ys_pos)

    plot_w = _WIDTH - _ML - _MR
    plot_h = _HEIGHT - _MT - _MB

    def px(x):
        return _ML + (x - x_lo) / (x_hi - x_lo) * plot_w

    def py(y):
        if log_y:
            y = math.log10(max(float(y), 10.0 ** y_lo))
        return _MT + (y_hi - y) / (y_hi - y_lo) * plot_h

    out = []
    out.append('<?xml version="1.0" encoding="UTF-8"?>')
    out.append(
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        'width="%d" height="%d" viewBox="0 0 %d %d">'
        % (_WIDTH, _HEIGHT, _WIDTH, _HEIGHT)
    )
    out.append('<rect width="%d" height="%d" fill="white"/>' % (_WIDTH, _HEIGHT))
    out.append('<text x="%d" y="24" font-family="sans-serif" font-size="15" '
               'text-anchor="middle">%s</text>' % (_WIDTH // 2, title))

    # frame
    out.append('<rect x="%d" y="%d" width="%d" height="%d" fill="none" '
               'stroke="#444444" stroke-width="1"/>' % (_ML, _MT, plot_w, plot_h))

    # y ticks: one per decade (log) or nice steps (linear)
    if log_y:
        y_ticks = list(range(int(y_lo), int(y_hi) + 1))
        y_lab = ["1e%d" % k for k in y_ticks]
    else:
        y_ticks = _nice_ticks(y_lo, y_hi)
        y_lab = ["%g" % v for v in y_ticks]
    for val, lab in zip(y_ticks, y_lab):
        yy = py(10.0 ** val) if log_y else py(val)
        out.append('<line x1="%d" y1="%.2f" x2="%d" y2="%.2f" stroke="#cccccc" '
                   'stroke-width="0.6"/>' % (_ML, yy, _ML + plot_w, yy))
        out.append('<text x="%d" y="%.2f" font-family="sans-serif" font-size="11" '
                   'text-anchor="end">%s</text>' % (_ML - 6, yy + 4, lab))
    for val in _nice_ticks(x_lo, x_hi):
        xx = px(val)
        out.append('<line x1="%.2f" y1="%d" x2="%.2f" y2="%d" stroke="#cccccc" '
                   'stroke-width="0.6"/>' % (xx, _MT, xx, _MT + plot_h))
        out.append('<text x="%.2f" y="%d" font-family="sans-serif" font-size="11" '
                   'text-anchor="middle">%g</text>' % (xx, _MT + plot_h + 16, val))

    out.append('<text x="%d" y="%d" font-family="sans-serif" font-size="13" '
               'text-anchor="middle">%s</text>'
               % (_ML + plot_w // 2, _HEIGHT - 14, xlabel))
    out.append('<text x="18" y="%d" font-family="sans-serif" font-size="13" '
               'text-anchor="middle" transform="rotate(-90 18 %d)">%s</text>'
               % (_MT + plot_h // 2, _MT + plot_h // 2, ylabel))

    for s in series:
        pts = " ".join(
            "%.2f,%.2f" % (px(float(x)), py(float(y)))
            for x, y in zip(s["x"], s["y"])
            if (not log_y) or float(y) > 0.0
        )
        dash = ' stroke-dasharray="7 4"' if s.get("dashed") else ""
        out.append('<polyline points="%s" fill="none" stroke="%s" '
                   'stroke-width="1.6"%s/>' % (pts, s["color"], dash))

    # legend
    ly = _MT + 14
    for s in series:
        dash = ' stroke-dasharray="7 4"' if s.get("dashed") else ""
        out.append('<line x1="%d" y1="%d" x2="%d" y2="%d" stroke="%s" '
                   'stroke-width="1.6"%s/>' % (_ML + plot_w - 170, ly, _ML + plot_w - 140, ly,
                                               s["color"], dash))
        out.append('<text x="%d" y="%d" font-family="sans-serif" '
                   'font-size="12">%s</text>' % (_ML + plot_w - 132, ly + 4, s["label"]))
        ly += 18
    out.append("</svg>")
    return "\n".join(out) + "\n"
