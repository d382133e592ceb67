"""Published trial-function parameters for twelve countries.

The first six countries were fitted with the quadratic small-time form and
have no start offset; the last six were fitted with the linear large-time
form with gamma fixed near 0.3.
"""

from .share import ShareCurveParams

QUADRATIC_CLASS = ("Hungary", "Italy", "Japan", "Croatia", "Slovenia", "Slovakia")
LINEAR_CLASS = ("Finland", "Sweden", "UK", "Netherlands", "Denmark", "Portugal")

COUNTRY_PARAMS = {
    "Hungary": ShareCurveParams(0.160, 3.498, 0.397, 50.0, 0.0),
    "Italy": ShareCurveParams(0.305, 5.195, 0.228, 50.0, 0.0),
    "Japan": ShareCurveParams(0.325, 6.697, 0.269, 50.0, 0.0),
    "Croatia": ShareCurveParams(0.585, 7.857, 0.206, 50.0, 0.0),
    "Slovenia": ShareCurveParams(0.165, 5.097, 0.190, 50.0, 0.0),
    "Slovakia": ShareCurveParams(0.160, 2.436, 0.397, 50.0, 0.0),
    "Finland": ShareCurveParams(0.119, 1.679, 0.30, 50.0, 15.0),
    "Sweden": ShareCurveParams(0.153, 1.583, 0.21, 50.0, 11.0),
    "UK": ShareCurveParams(0.133, 1.920, 0.30, 50.0, 15.0),
    "Netherlands": ShareCurveParams(0.122, 1.411, 0.26, 50.0, 13.0),
    "Denmark": ShareCurveParams(0.261, 4.367, 0.30, 50.0, 16.0),
    "Portugal": ShareCurveParams(0.155, 2.054, 0.30, 50.0, 13.0),
}


def lookup(name: str) -> ShareCurveParams:
    for key, params in COUNTRY_PARAMS.items():
        if key.lower() == name.lower():
            return params
    if name.lower() == "netherland":
        return COUNTRY_PARAMS["Netherlands"]
    raise KeyError(f"no reference parameters for {name!r}; known: {', '.join(COUNTRY_PARAMS)}")
