# Colormaps for previews and contact sheets

from dataclasses import dataclass

import matplotlib
import numpy as np
from matplotlib.colors import hsv_to_rgb


@dataclass
class Coloring:
    """
    Basic coloring class for previews.

    Parameters
    ----------
    vmin : float
        The minimum value of the colormap.
    vmax : float
        The maximum value of the colormap.
    color_map_array : np.ndarray
        (n, 4) RGBA table.
    nan_color : tuple
        The color for NaN values.
    """
    vmin: float
    vmax: float
    color_map_array: np.ndarray
    nan_color: tuple = (1.0, 1.0, 0.0)

    def __call__(self, values):
        """
        Map scalar values to RGB.

        Parameters
        ----------
        values : ndarray
            Any shape of scalars.

        Returns
        -------
        ndarray
            values.shape + (3,) floats in [0, 1].
        """

        values = np.asarray(values, dtype=np.float64)
        span = self.vmax - self.vmin if self.vmax > self.vmin else 1.0
        scaled = np.clip((values - self.vmin) / span, 0.0, 1.0)
        index = np.round(np.nan_to_num(scaled) * (len(self.color_map_array) - 1)).astype(np.int64)
        rgb = self.color_map_array[index, :3].copy()
        rgb[np.isnan(values)] = self.nan_color
        return rgb


class Colormap(Coloring):
    """A colormap built from a matplotlib colormap.

    Parameters
    ----------
    name : str
        The name of the colormap using matplotlib's naming convention.
    vmin : float
        The minimum value of the colormap.
    vmax : float
        The maximum value of the colormap.
    num_table_values : int
        The number of values in the colormap table.
    nan_color : tuple
        The color for NaN values.
    """

    def __init__(self, name="viridis", vmin=0.0, vmax=1.0, num_table_values=256, nan_color=(1.0, 1.0, 0.0)):
        self.name = name
        self.num_table_values = num_table_values
        self.cmap = matplotlib.colormaps[name].resampled(num_table_values)
        table = np.array([self.cmap(i) for i in range(num_table_values)])
        super().__init__(vmin, vmax, table, nan_color)


def flow_to_rgb(flow, max_magnitude=None):
    """
    Color a flow field, hue for direction and saturation for magnitude.
    Invalid pixels are black.

    Parameters
    ----------
    flow : FlowField
        The flow to color.
    max_magnitude : float, optional
        Magnitude mapped to full saturation, the largest valid one by default.

    Returns
    -------
    ndarray
        (h, w, 3) floats in [0, 1].
    """

    u = flow.uv[..., 0].astype(np.float64)
    v = flow.uv[..., 1].astype(np.float64)
    magnitude = np.hypot(u, v)
    if max_magnitude is None:
        max_magnitude = magnitude[flow.valid].max() if flow.valid.any() else 0.0
    max_magnitude = max(max_magnitude, 1e-9)

    hsv = np.empty(flow.uv.shape[:2] + (3,))
    hsv[..., 0] = (np.arctan2(-v, -u) / np.pi + 1.0) / 2.0
    hsv[..., 1] = np.clip(magnitude / max_magnitude, 0.0, 1.0)
    hsv[..., 2] = 1.0
    rgb = hsv_to_rgb(hsv)
    rgb[~flow.valid] = 0.0
    return rgb


def instance_colors(instance, cmap="tab20"):
    """ Distinct color per body id, black for the background and ground """

    table = matplotlib.colormaps[cmap]
    instance = np.asarray(instance)
    rgb = np.array(table((instance.astype(np.int64) - 1) % table.N))[..., :3]
    rgb[instance == 0] = 0.0
    return rgb

