# Command line interface
#
#   voidforge generate --seed 7 --count 200 --out data/
#   voidforge validate --dir data/
#   voidforge stats --dir data/
#   voidforge quadmask --frames-dir data/scene_000000/factual --object-mask-dir data/scene_000000 --out masks/
#   voidforge warp-noise --flow-dir data/scene_000000/counterfactual --seed 7 --out noise.vnse
#   voidforge inspect --dir data/ --scene 0 --out sheet.png

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from voidforge.config import ForgeConfig, MaskConfig, NoiseConfig, SamplerParams
from voidforge.dataset.formats import read_flow, read_png, write_noise, write_png
from voidforge.dataset.inspect import contact_sheet
from voidforge.dataset.pipeline import generate
from voidforge.dataset.stats import compute_stats
from voidforge.dataset.validate import validate_dataset
from voidforge.errors import ForgeError, ForgeIOError
from voidforge.masks import BinaryMaskSeq, MaskRole, compose_trimask, ground_truth_reasoner, remote_reasoner
from voidforge.noisewarp import warp_volume
from voidforge.physics import simulate_counterfactual
from voidforge.render import render_pair
from voidforge.scene import SceneSpec

logger = logging.getLogger(__name__)

GROUND_TRUTH = "ground-truth"


def _resolution(text):
    try:
        width, height = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected WIDTHxHEIGHT, got {text!r}")
    if width < 1 or height < 1:
        raise argparse.ArgumentTypeError(f"resolution must be positive, got {text!r}")
    return width, height


def _template_mix(text):
    try:
        weights = tuple(int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected three comma separated integer weights, got {text!r}")
    if len(weights) != 3 or any(w < 0 for w in weights) or sum(weights) < 1:
        raise argparse.ArgumentTypeError(f"expected three non-negative integer weights with a positive sum, got {text!r}")
    return weights


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return value


def _positive_float(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if not value > 0.0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return value


def _fraction(text):
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"expected a fraction in [0, 1], got {text!r}")
    return value


def build_parser():
    parser = argparse.ArgumentParser(prog="voidforge", description="Counterfactual scene simulator and dataset forge")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")
    commands = parser.add_subparsers(dest="command", required=True)

    generate = commands.add_parser("generate", help="generate a dataset of counterfactual pairs")
    generate.add_argument("--seed", type=int, required=True, help="master seed")
    generate.add_argument("--count", type=_positive_int, required=True, help="number of pairs")
    generate.add_argument("--out", type=Path, required=True, help="dataset directory")
    generate.add_argument("--resolution", type=_resolution, default=(128, 128), help="WIDTHxHEIGHT")
    generate.add_argument("--frames", type=_positive_int, default=49)
    generate.add_argument("--grid", type=_positive_int, default=8, help="cells per side of the affected grid")
    generate.add_argument("--jobs", type=_positive_int, default=None, help="worker processes (default $VOID_FORGE_JOBS or 1)")
    generate.add_argument("--template-mix", type=_template_mix, default=(1, 1, 1),
                          help="weights of collision_chain,support_removal,obstruction_removal")
    generate.add_argument("--holdout", type=_fraction, default=0.0, help="fraction of scenes in the test split")
    generate.add_argument("--no-progress", action="store_true")

    validate = commands.add_parser("validate", help="check a dataset and print a JSON report")
    validate.add_argument("--dir", type=Path, required=True)
    validate.add_argument("--threshold", type=float, default=35.0, help="minimum flow warp PSNR in dB")

    stats = commands.add_parser("stats", help="print dataset statistics as JSON")
    stats.add_argument("--dir", type=Path, required=True)

    quadmask = commands.add_parser("quadmask", help="derive quadmasks from a video and its target mask")
    quadmask.add_argument("--frames-dir", type=Path, required=True, help="directory of rgb_*.png frames")
    quadmask.add_argument("--object-mask-dir", type=Path, required=True, help="directory of object_mask_*.png")
    quadmask.add_argument("--reasoner", default=GROUND_TRUTH, help=f"{GROUND_TRUTH} or the URL of a remote reasoner")
    quadmask.add_argument("--scene", type=Path, default=None,
                          help="scene.json for the ground-truth reasoner (default: next to the object masks)")
    quadmask.add_argument("--grid", type=_positive_int, default=8)
    quadmask.add_argument("--timeout", type=_positive_float, default=60.0, help="remote reasoner timeout in seconds")
    quadmask.add_argument("--out", type=Path, required=True)

    warp = commands.add_parser("warp-noise", help="build a flow-warped noise volume")
    warp.add_argument("--flow-dir", type=Path, required=True, help="directory of flow_*.vflo files")
    warp.add_argument("--seed", type=int, required=True)
    warp.add_argument("--k", type=_positive_int, default=4, help="render to noise downsample factor")
    warp.add_argument("--channels", type=_positive_int, default=4)
    warp.add_argument("--out", type=Path, required=True, help="output .vnse file")

    inspect = commands.add_parser("inspect", help="write a contact sheet of one pair")
    inspect.add_argument("--dir", type=Path, required=True)
    inspect.add_argument("--scene", required=True, help="scene id or index")
    inspect.add_argument("--out", type=Path, required=True)
    inspect.add_argument("--columns", type=_positive_int, default=8)

    return parser


def _print_json(data):
    print(json.dumps(data, indent=2))


def _sorted_files(directory, pattern):
    files = sorted(Path(directory).glob(pattern))
    if not files:
        raise ForgeIOError(f"no {pattern} files", directory)
    return files


# Subcommands

def run_generate(args):
    sampler = SamplerParams(frames=args.frames, resolution=tuple(args.resolution), template_mix=args.template_mix)
    overrides = {"sampler": sampler, "masks": MaskConfig(grid=args.grid), "holdout": args.holdout}
    if args.jobs is not None:
        overrides["jobs"] = args.jobs
    config = ForgeConfig.from_env(**overrides)
    records = generate(args.out, args.seed, args.count, config, progress=not args.no_progress)
    logger.info("Wrote %d records to %s", len(records), args.out)
    return 0


def run_validate(args):
    report = validate_dataset(args.dir, args.threshold)
    _print_json({"dir": str(args.dir), "ok": not report, "violations": [v.to_dict() for v in report]})
    return 1 if report else 0


def run_stats(args):
    _print_json(compute_stats(args.dir).to_dict())
    return 0


def _ground_truth_quadmask(args, object_mask):
    scene_path = args.scene or args.object_mask_dir / "scene.json"
    try:
        spec = SceneSpec.from_json(scene_path.read_text(encoding="utf-8"))
    except OSError as error:
        raise ForgeIOError(f"cannot read scene ({error.strerror})", scene_path) from error
    pair = simulate_counterfactual(spec)
    renders = render_pair(pair, spec)
    reasoner = ground_truth_reasoner(pair, renders, spec, MaskConfig(grid=args.grid))
    return reasoner.quadmask(None, object_mask)


def run_quadmask(args):
    frames = np.stack([read_png(p) / 255.0 for p in _sorted_files(args.frames_dir, "rgb_*.png")])
    masks = np.stack([read_png(p) > 0 for p in _sorted_files(args.object_mask_dir, "object_mask_*.png")])
    object_mask = BinaryMaskSeq(masks, MaskRole.OBJECT)

    if args.reasoner == GROUND_TRUTH:
        quadmask = _ground_truth_quadmask(args, object_mask)
    else:
        reasoner = remote_reasoner(args.reasoner, grid=args.grid, timeout=args.timeout)
        quadmask = reasoner.quadmask(frames, object_mask)
    trimask = compose_trimask(object_mask)

    args.out.mkdir(parents=True, exist_ok=True)
    for t in range(len(quadmask)):
        write_png(args.out / f"quadmask_{t:04d}.png", quadmask.frames[t])
        write_png(args.out / f"trimask_{t:04d}.png", trimask.frames[t])
    logger.info("Wrote %d quadmasks to %s", len(quadmask), args.out)
    return 0


def run_warp_noise(args):
    flows = [read_flow(p) for p in _sorted_files(args.flow_dir, "flow_*.vflo")]
    noise = NoiseConfig(k=args.k, channels=args.channels)
    shape = (len(flows) + 1, flows[0].height // noise.k, flows[0].width // noise.k, noise.channels)
    volume = warp_volume(flows, args.seed, shape, noise.k)
    write_noise(args.out, volume.frames)
    logger.info("Wrote %s noise volume to %s", volume.frames.shape, args.out)
    return 0


def run_inspect(args):
    contact_sheet(args.dir, args.scene, args.out, args.columns)
    return 0


COMMANDS = {
    "generate": run_generate,
    "validate": run_validate,
    "stats": run_stats,
    "quadmask": run_quadmask,
    "warp-noise": run_warp_noise,
    "inspect": run_inspect,
}


def main(argv=None):
    """
    Run the command line interface.

    Parameters
    ----------
    argv : list of str, optional
        Arguments without the program name, sys.argv[1:] by default.

    Returns
    -------
    int
        0 on success, 1 on validation failures and forge errors, 2 on usage errors.
    """

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as stop:
        return stop.code if isinstance(stop.code, int) else 2

    level = (logging.WARNING, logging.INFO, logging.DEBUG)[min(args.verbose, 2)]
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")

    try:
        return COMMANDS[args.command](args)
    except ForgeError as error:
        logger.error("%s: %s", type(error).__name__, error)
        print(f"error: {error}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
