from voidforge.camera import CameraPose, camera_at
from voidforge.coloring import Colormap, flow_to_rgb, instance_colors
from voidforge.buffers import FlowField, FramePacket
from voidforge.config import ForgeConfig, MaskConfig, NoiseConfig, PhysicsConfig, SamplerParams
import voidforge.errors
import voidforge.scene
import voidforge.physics
import voidforge.render
import voidforge.masks
import voidforge.noisewarp
import voidforge.dataset
