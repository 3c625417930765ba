# main.py - CLI de huellas de audio
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

# Agregar el directorio src al path para imports
src_path = Path(__file__).parent / "src"
sys.path.insert(0, str(src_path))

from classifier.metrics import format_report
from config.settings import logging_settings
from core.errors import FingerprintError
from features.voice_features import FeatureSet
from services.pipeline_service import fingerprint_service

logger = logging.getLogger("audiofp")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class UsageError(Exception):
    def __init__(self, status: int, message: str = ""):
        super().__init__(message)
        self.status = status


class CliParser(argparse.ArgumentParser):
    """ArgumentParser que no termina el proceso: los errores de uso devuelven exit 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(EXIT_USAGE, f"{self.prog}: error: {message}")

    def exit(self, status=0, message=None):
        if message:
            sys.stderr.write(message)
        raise UsageError(status)


def _common() -> argparse.ArgumentParser:
    common = CliParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="Semilla maestra (default: AUDIOFP_SEED)")
    common.add_argument("-v", "--verbose", action="store_true", help="Logs en nivel DEBUG")
    return common


def build_parser() -> CliParser:
    common = _common()
    parser = CliParser(prog="audiofp", description="Huellas de audio RGB 512x512: codificación, descriptores y clasificador base.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="<comando>")

    p = sub.add_parser("encode", parents=[common], help="WAV -> huella RGB (PNG)")
    p.add_argument("input", metavar="in.wav")
    p.add_argument("output", metavar="out.png")

    p = sub.add_parser("decode", parents=[common], help="Huella RGB (PNG) -> WAV desde el canal verde")
    p.add_argument("input", metavar="in.png")
    p.add_argument("output", metavar="out.wav")

    p = sub.add_parser("features", parents=[common], help="Imprime los descriptores (mediana, media)")
    p.add_argument("input", metavar="in.wav")
    p.add_argument("--json", action="store_true", help="Salida JSON plana")

    p = sub.add_parser("dataset", parents=[common], help="Genera el corpus sintético de dos locutores")
    p.add_argument("--out", required=True, metavar="DIR")
    p.add_argument("--per-speaker", required=True, type=int, metavar="N")
    p.add_argument("--workers", type=int, default=None, metavar="N")

    p = sub.add_parser("train", parents=[common], help="Entrena el clasificador base")
    p.add_argument("--manifest", required=True, metavar="CSV")
    p.add_argument("--model", required=True, metavar="OUT")
    p.add_argument("--split", type=float, default=None)
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--lr", type=float, default=None)
    p.add_argument("--augment", action="store_true", help="Un aumento aleatorio por imagen y epoch")

    p = sub.add_parser("eval", parents=[common], help="Evalúa un modelo sobre la parte de prueba del manifiesto")
    p.add_argument("--manifest", required=True, metavar="CSV")
    p.add_argument("--model", required=True, metavar="IN")
    p.add_argument("--report", choices=("json", "text"), default="text")

    p = sub.add_parser("predict", parents=[common], help="Clasifica una huella")
    p.add_argument("--model", required=True, metavar="IN")
    p.add_argument("input", metavar="img.png")

    p = sub.add_parser("wave-encode", parents=[common], help="WAV -> imagen de forma de onda en escala de grises")
    p.add_argument("input", metavar="in.wav")
    p.add_argument("output", metavar="out.png")

    p = sub.add_parser("wave-decode", parents=[common], help="Imagen de forma de onda -> WAV")
    p.add_argument("input", metavar="in.png")
    p.add_argument("output", metavar="out.wav")

    p = sub.add_parser("planes", parents=[common], help="Escribe red.png, green.png y blue.png")
    p.add_argument("input", metavar="in.png")
    p.add_argument("out_dir", metavar="out_dir")

    return parser


def configure_logging(verbose: bool) -> None:
    level = logging.DEBUG if verbose else getattr(logging, logging_settings.level, logging.INFO)
    logging.basicConfig(
        stream=sys.stderr,
        level=level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        force=True,
    )


def format_features(features: FeatureSet) -> str:
    """Tabla alineada nombre / mediana / media."""
    lines = [f"{'descriptor':<14} {'mediana':>14} {'media':>14}"]
    for name in type(features).model_fields:
        median, mean = getattr(features, name)
        if isinstance(median, (list, tuple)):
            for i, (md, mn) in enumerate(zip(median, mean)):
                lines.append(f"{f'{name}[{i}]':<14} {md:>14.6f} {mn:>14.6f}")
        else:
            lines.append(f"{name:<14} {median:>14.6f} {mean:>14.6f}")
    return "\n".join(lines) + "\n"


def dispatch(args: argparse.Namespace) -> None:
    seed = args.seed if args.seed is not None else fingerprint_service.default_seed()
    out = sys.stdout

    if args.command == "encode":
        fingerprint_service.encode_file(args.input, args.output)
    elif args.command == "decode":
        fingerprint_service.decode_file(args.input, args.output)
    elif args.command == "features":
        features = fingerprint_service.features_file(args.input)
        if args.json:
            out.write(json.dumps(features.to_flat_dict(), indent=2) + "\n")
        else:
            out.write(format_features(features))
    elif args.command == "dataset":
        fingerprint_service.build_dataset(args.out, args.per_speaker, seed, workers=args.workers)
    elif args.command == "train":
        fingerprint_service.train_from_manifest(
            args.manifest,
            args.model,
            split=args.split,
            epochs=args.epochs,
            learning_rate=args.lr,
            seed=seed,
            augment=args.augment,
        )
    elif args.command == "eval":
        metrics = fingerprint_service.evaluate_manifest(args.manifest, args.model)
        out.write(metrics.to_json() + "\n" if args.report == "json" else format_report(metrics))
    elif args.command == "predict":
        out.write(json.dumps(fingerprint_service.predict_file(args.model, args.input), indent=2) + "\n")
    elif args.command == "wave-encode":
        fingerprint_service.wave_encode(args.input, args.output)
    elif args.command == "wave-decode":
        fingerprint_service.wave_decode(args.input, args.output)
    elif args.command == "planes":
        fingerprint_service.planes(args.input, args.out_dir)


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Punto de entrada: 0 éxito, 1 error de uso, 2 error de datos."""
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv) if argv is not None else None)
    except UsageError as e:
        if str(e):
            sys.stderr.write(str(e) + "\n")
        return e.status

    configure_logging(args.verbose)
    try:
        dispatch(args)
    except FingerprintError as e:
        logger.debug(f"Fallo en '{args.command}'", exc_info=True)
        sys.stderr.write(f"{type(e).__name__}: {e}\n")
        return EXIT_DATA
    except Exception as e:
        logger.error(f"Error inesperado en '{args.command}': {e}", exc_info=True)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(run(sys.argv[1:]))
