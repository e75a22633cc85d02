from voidforge.noisewarp.rng import sample_base_noise
from voidforge.noisewarp.warp import NoiseVolume, downsample_flow, warp_noise, warp_volume
