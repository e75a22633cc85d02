from voidforge.render.camera import calculate_ray_direction
from voidforge.render.geometry import SHADOW_ATTENUATION, render_frame
from voidforge.render.flow import ground_truth_flow
from voidforge.render.pair import PairRenders, camera_path, render_pair, render_trajectory
