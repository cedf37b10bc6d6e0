"""
Interface en ligne de commande des transformées en shearlets
"""

import argparse
import sys
from collections import Counter
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np

from .base_transform import BaseTransform
from .config import ShearlabConfig
from .dnst import DNST, DnstParams, block_keys, build_fan_filter
from .dsst import DSST, DsstParams, redundancy as dsst_redundancy, shear_range
from .errors import ConfigError, FormatError, NumericalError, ShearlabError
from .fdst import FDST
from .formats import (
    load_image,
    read_coefficients,
    read_manifest,
    read_pparray,
    read_weights,
    save_image,
    write_coefficients,
    write_pparray,
    write_weights,
)
from .measures import MEASURES, reports_to_frame, run_all, write_reports
from .ppft import ppft_adjoint, ppft_forward
from .ppgrid import build_grid
from .schemas import CGResult
from .utils import Logger
from .weights import solve_weights
from .windows import block_count, parameter_ranges, WindowSystem

TRANSFORMS = ("fdst", "dsst", "dnst")
WEIGHTS_AUTO = "auto"

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2


class ShearlabArgumentParser(argparse.ArgumentParser):
    """Erreurs d'usage : message, aide courte et code de sortie 1"""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: erreur: {message}\n")


class ShearlabCLI:
    """Interface CLI des transformées FDST, DSST et DNST"""

    def __init__(self, config: Optional[ShearlabConfig] = None):
        """Initialise le CLI avec une configuration validée"""
        self.config = config or ShearlabConfig()
        self.config.validate()
        Logger.debug("CLI shearlab démarré")

    # ------------------------------------------------------------ fabrique

    def build_transform(self, name: str, size: Optional[int] = None, weights: Optional[str] = None) -> BaseTransform:
        """
        Construit une transformée à partir de la configuration

        Args:
            name: fdst, dsst ou dnst
            size: taille imposée (défaut: configuration)
            weights: fichier SHWT des poids de la FDST, ou "auto" (calcul ou cache)
        """
        c = self.config
        size = size or c.size
        common = {"cg_tol": c.cg_tol, "cg_maxiter": c.cg_maxiter}
        if name == "fdst" and weights and weights != WEIGHTS_AUTO:
            function = read_weights(weights)
            if function.grid.N != size:
                raise ValueError(f"Poids {weights} calculés pour N={function.grid.N}, image N={size}")
            Logger.loading(f"Poids relus: {weights} (R={function.grid.R}, choix {function.choice})")
            return FDST(function.grid, function, **common)
        if name == "fdst":
            return FDST.build(size, c.oversampling, c.choice, c.m0, cache_dir=c.cache_dir,
                              progress=c.progress, **common)
        if name == "dsst":
            params = DsstParams(J=c.scales, c1=c.c1, c2=c.c2, phi_mode=c.phi_mode, wavelet=c.wavelet,
                                cache_dir=c.cache_dir)
            return DSST(size, params, **common)
        if name == "dnst":
            params = DnstParams(J=c.scales, wavelet=c.wavelet, fan_size=c.fan_size,
                                fan_transition=c.fan_transition, cache_dir=c.cache_dir)
            return DNST(size, params, progress=c.progress, **common)
        raise ValueError(f"Transformée inconnue: {name} (attendu {', '.join(TRANSFORMS)})")

    def _transform_from_manifest(self, name: str, directory: Path, weights: Optional[str] = None) -> BaseTransform:
        """Reprend N, R, choix, J… du manifeste pour reconstruire la transformée d'origine"""
        manifest = read_manifest(directory)
        if manifest.get("transform") != name:
            raise FormatError(f"{directory}: coefficients {manifest.get('transform')!r}, attendu {name!r}")
        overrides = {"size": manifest["N"]}
        for key, field_name in (("R", "oversampling"), ("choice", "choice"), ("J", "scales"), ("c1", "c1"),
                                ("c2", "c2"), ("wavelet", "wavelet"), ("phi_mode", "phi_mode"),
                                ("fan_size", "fan_size"), ("fan_transition", "fan_transition")):
            if manifest.get(key) is not None:
                overrides[field_name] = manifest[key]
        if manifest.get("m0") is not None and manifest.get("R") is not None:
            m0 = Fraction(str(manifest["m0"]))
            if m0 != build_grid(manifest["N"], manifest["R"]).m0:
                overrides["m0"] = float(m0)
        self.config = self.config.with_overrides(overrides)
        return self.build_transform(name, weights=weights)

    # ------------------------------------------------------------ commandes

    def ppft_command(self, action: str, input_path: str, output_path: str) -> int:
        """PPFT directe (image → SHPP) ou adjointe (SHPP → image)"""
        if action == "forward":
            image = load_image(input_path, square=True)
            grid = build_grid(image.shape[0], self.config.oversampling, self.config.m0)
            data = ppft_forward(image, grid)
            write_pparray(output_path, data)
            Logger.success(f"PPFT N={grid.N}, R={grid.R} → {output_path}")
        else:
            data = read_pparray(input_path)
            save_image(output_path, ppft_adjoint(data))
            Logger.success(f"PPFT adjointe → {output_path}")
        return EXIT_OK

    def weights_command(self, output_path: Optional[str] = None, condition: bool = False,
                        no_cache: bool = False) -> int:
        """Calcule (ou relit) les poids de densité de la configuration"""
        c = self.config
        grid = build_grid(c.size, c.oversampling, c.m0)
        weights = solve_weights(grid, c.choice, cache_dir=None if no_cache else c.cache_dir,
                                use_cache=not no_cache, progress=c.progress)
        Logger.stats(f"Poids N={grid.N}, R={grid.R}, choix {c.choice}: résidu {weights.residual:.3e}")
        if output_path:
            write_weights(output_path, weights)
            Logger.save(f"Poids écrits: {output_path}")
        if condition:
            estimate = FDST(grid, weights, cg_tol=c.cg_tol, cg_maxiter=c.cg_maxiter).estimate_condition(seed=c.seed)
            print(f"cond(P*wP) = {estimate.cond:.4f}  (λ_min={estimate.lambda_min:.4f}, λ_max={estimate.lambda_max:.4f})")
            if not estimate.converged:
                Logger.warning("Itérations de puissance non convergées")
        return EXIT_OK

    def transform_command(self, name: str, action: str, input_path: str, output_path: str,
                          weights: Optional[str] = None) -> int:
        """forward : image → répertoire de coefficients ; adjoint/inverse : répertoire → image"""
        if action == "forward":
            image = load_image(input_path, square=True)
            transform = self.build_transform(name, size=image.shape[0], weights=weights)
            coefficients = transform.forward(image)
            write_coefficients(output_path, coefficients, {"seed": self.config.seed})
            Logger.success(f"{name.upper()}: {coefficients.count} coefficients, {len(coefficients)} blocs "
                           f"(redondance {coefficients.count / image.size:.2f})")
            return EXIT_OK

        directory = Path(input_path)
        transform = self._transform_from_manifest(name, directory, weights)
        coefficients = read_coefficients(directory)
        if action == "adjoint":
            save_image(output_path, transform.adjoint(coefficients))
            Logger.success(f"{name.upper()} adjointe → {output_path}")
            return EXIT_OK

        result: CGResult = transform.reconstruct(coefficients)
        save_image(output_path, np.real_if_close(result.x))
        if not result.converged:
            Logger.error(f"Reconstruction {name.upper()}: gradient conjugué non convergé "
                         f"({result.error_message}, résidu {result.relative_residual:.3e})")
            return EXIT_NUMERICAL
        Logger.success(f"{name.upper()} inverse ({result.iterations} itérations) → {output_path}")
        return EXIT_OK

    def measure_command(self, names: List[str], transform_name: str, output_path: Optional[str] = None,
                        csv_path: Optional[str] = None, image_path: Optional[str] = None,
                        slope: Optional[float] = None, speed_sizes: Optional[Sequence[int]] = None,
                        no_timing: bool = False) -> int:
        """Exécute une ou toutes les mesures et écrit le rapport JSON (et CSV)"""
        c = self.config
        transform = self.build_transform(transform_name)
        sizes = list(speed_sizes) if speed_sizes else [n for n in (32, 64, 128, 256, 512) if n <= c.size]
        if transform_name == "dnst" and not speed_sizes:
            sizes = [n for n in sizes if n >= 128]
        options: Dict[str, Dict] = {
            "speed": {"factory": lambda size: self.build_transform(transform_name, size),
                      "sizes": sizes, "threads": c.threads},
            "isometry": {"cg_tol": c.cg_tol},
        }
        if image_path:
            options["robustness"] = {"image": load_image(image_path, square=True)}
        if slope is not None:
            options["shear"] = {"slope": slope}
        names = list(MEASURES) if names == ["all"] else names
        reports = run_all(transform, names, seed=c.seed, options=options, progress=c.progress)
        for report in reports:
            report.parameters["threads"] = c.threads

        if output_path:
            write_reports(output_path, reports, include_timing=not no_timing)
        if csv_path:
            reports_to_frame(reports).to_csv(csv_path, index=False)
            Logger.save(f"Tableau CSV écrit: {csv_path}")
        if not output_path and not csv_path:
            print(reports_to_frame(reports).to_string(index=False))
        return EXIT_OK

    def info_command(self, transform_name: str = "all", plot_fan: Optional[str] = None) -> int:
        """Inventaire des blocs et redondance sans calcul de poids ni de filtres"""
        c = self.config
        names = TRANSFORMS if transform_name == "all" else (transform_name,)
        print(f"\n{'=' * 60}")
        print(f"INVENTAIRE (N={c.size})")
        print(f"{'=' * 60}")
        if "fdst" in names:
            self._fdst_info()
        if "dsst" in names:
            self._dsst_info()
        if "dnst" in names:
            self._dnst_info()
        if plot_fan:
            build_fan_filter(c.fan_size, c.fan_transition).plot_response(plot_fan)
        return EXIT_OK

    def _fdst_info(self) -> None:
        c = self.config
        ranges = parameter_ranges(c.size, c.oversampling)
        grid = build_grid(c.size, c.oversampling, c.m0)
        plan = WindowSystem(grid).plan()
        total = block_count(c.size, c.oversampling)
        print(f"\n🔷 FDST (R={c.oversampling}, m0={grid.m0})")
        print(f"   j_L={ranges.j_low}, j_H={ranges.j_high}")
        for j in ranges.scales:
            shapes = Counter(shape for key, shape in plan.items() if key.kind == "shearlet" and key.j == j)
            blocks = sum(shapes.values())
            detail = ", ".join(f"{count}×{rows}x{cols}" for (rows, cols), count in sorted(shapes.items()))
            print(f"   j={j:>2}: {blocks} blocs ({detail})")
        scaling = [shape for key, shape in plan.items() if key.kind == "scaling"]
        print(f"   basse fréquence: {len(scaling)} blocs {scaling[0][0]}x{scaling[0][1]}")
        print(f"   coefficients: {total}, redondance {total / c.size ** 2:.3f}")

    def _dsst_info(self) -> None:
        c = self.config
        transform = DSST(c.size, DsstParams(J=c.scales, c1=c.c1, c2=c.c2, wavelet=c.wavelet))
        count = transform.coefficient_count()
        print(f"\n🔶 DSST (J={c.scales}, c1={c.c1}, c2={c.c2})")
        for j in range(c.scales):
            s1, s2 = transform.steps[j]
            print(f"   j={j}: {2 * len(shear_range(j))} blocs, pas ({s1}, {s2})")
        print(f"   coefficients: {count}, redondance {count / c.size ** 2:.3f}")
        print(f"   modèle (2·2^{{j/2}} cisaillements par cône): redondance "
              f"{float(dsst_redundancy(c.c1, c.c2, c.scales)):.3f}, limite {float(dsst_redundancy(c.c1, c.c2)):.3f}")

    def _dnst_info(self) -> None:
        c = self.config
        keys = block_keys(c.scales)
        count = len(keys) * c.size ** 2
        print(f"\n🔸 DNST (J={c.scales}, éventail {c.fan_size}x{c.fan_size}, non décimée)")
        print(f"   {len(keys)} filtres de {c.size}x{c.size}")
        print(f"   coefficients: {count}, redondance {count / c.size ** 2:.3f}")


def _add_config_arguments(parser: argparse.ArgumentParser) -> None:
    """Surcharges des champs de configuration communs aux sous-commandes"""
    group = parser.add_argument_group("configuration")
    group.add_argument("--size", type=int, help="Côté N des images")
    group.add_argument("--oversampling", type=int, help="Suréchantillonnage radial R")
    group.add_argument("--m0", type=float, help="Dénominateur de Fourier m0 de la grille (défaut 2(RN+1)/R)")
    group.add_argument("--choice", type=int, choices=(0, 1, 2), help="Base des poids de densité")
    group.add_argument("--scales", type=int, help="Nombre d'échelles J (DSST, DNST)")
    group.add_argument("--c1", type=float, help="Constante d'échantillonnage c₁ (DSST)")
    group.add_argument("--c2", type=float, help="Constante d'échantillonnage c₂ (DSST)")
    group.add_argument("--phi", dest="phi_mode", choices=("skip", "table"), help="Convolution Φ_k du cisaillement (DSST)")
    group.add_argument("--wavelet", help="Ondelette PyWavelets des filtres h, g (DSST, DNST)")
    group.add_argument("--fan-size", type=int, dest="fan_size", help="Taille impaire du filtre en éventail (DNST)")
    group.add_argument("--transition", type=float, dest="fan_transition", help="Transition de l'éventail (DNST)")
    group.add_argument("--seed", type=int, help="Graine des images de test")
    group.add_argument("--cg-tol", type=float, dest="cg_tol", help="Tolérance du gradient conjugué")
    group.add_argument("--cache-dir", dest="cache_dir", help="Répertoire de cache (défaut: SHEARLAB_CACHE)")


def build_parser() -> argparse.ArgumentParser:
    parser = ShearlabArgumentParser(
        prog="shearlab",
        description="Transformées en shearlets numériques (FDST, DSST, DNST) et mesures de performance",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Exemples d'utilisation:

  # Inventaire des blocs pour N=64, R=8
  python -m shearlab info --size 64 --oversampling 8

  # Poids de densité (choix 1) et conditionnement de P*wP
  python -m shearlab weights compute --size 128 --condition

  # Transformée directe puis inverse
  python -m shearlab fdst forward image.pgm coeffs/
  python -m shearlab fdst inverse coeffs/ reconstruction.shlm

  # Toutes les mesures pour la FDST
  python -m shearlab measure all --transform fdst --size 64 --seed 42 --out report.json
        """,
    )
    parser.add_argument("--config", help="Fichier de configuration clé=valeur")
    parser.add_argument("--threads", type=int, help="Nombre de threads déclaré dans les rapports")
    parser.add_argument("--log-level", dest="log_level", help="Niveau de log (DEBUG, INFO, WARNING…)")

    subparsers = parser.add_subparsers(dest="command", help="Commandes disponibles", parser_class=ShearlabArgumentParser)

    ppft_parser = subparsers.add_parser("ppft", help="Transformée de Fourier pseudo-polaire")
    ppft_parser.add_argument("action", choices=("forward", "adjoint"))
    ppft_parser.add_argument("input", help="Image (PGM/SHLM) ou tableau SHPP")
    ppft_parser.add_argument("output", help="Fichier de sortie")
    _add_config_arguments(ppft_parser)

    weights_parser = subparsers.add_parser("weights", help="Poids de densité")
    weights_parser.add_argument("action", choices=("compute",))
    weights_parser.add_argument("-o", "--out", help="Écrire les poids au format SHWT")
    weights_parser.add_argument("--condition", action="store_true", help="Estimer cond(P*wP)")
    weights_parser.add_argument("--no-cache", action="store_true", help="Ignorer le cache")
    _add_config_arguments(weights_parser)

    for name in TRANSFORMS:
        transform_parser = subparsers.add_parser(name, help=f"Transformée {name.upper()}")
        transform_parser.add_argument("action", choices=("forward", "adjoint", "inverse"))
        transform_parser.add_argument("input", help="Image (forward) ou répertoire de coefficients")
        transform_parser.add_argument("output", help="Répertoire de coefficients (forward) ou image")
        if name == "fdst":
            transform_parser.add_argument("--weights", default=WEIGHTS_AUTO, metavar="FICHIER|auto",
                                          help="Poids SHWT précalculés, ou auto (calcul ou cache)")
        _add_config_arguments(transform_parser)

    measure_parser = subparsers.add_parser("measure", help="Mesures quantitatives")
    measure_parser.add_argument("names", nargs="+", choices=("all",) + tuple(MEASURES), metavar="NAME",
                                help=f"all ou parmi: {', '.join(MEASURES)}")
    measure_parser.add_argument("--transform", choices=TRANSFORMS, default="fdst")
    measure_parser.add_argument("--image", help="Image de la mesure de robustesse")
    measure_parser.add_argument("--slope", type=float, help="Pente s de la mesure d'invariance au cisaillement")
    measure_parser.add_argument("--speed-sizes", type=int, nargs="+", dest="speed_sizes",
                                help="Tailles de la mesure de vitesse")
    measure_parser.add_argument("--out", help="Rapport JSON")
    measure_parser.add_argument("--csv", help="Tableau CSV (pandas)")
    measure_parser.add_argument("--no-timing", action="store_true", dest="no_timing",
                                help="Omettre les champs chronométrés du rapport")
    _add_config_arguments(measure_parser)

    info_parser = subparsers.add_parser("info", help="Inventaire des blocs (sans calcul)")
    info_parser.add_argument("--transform", choices=("all",) + TRANSFORMS, default="all")
    info_parser.add_argument("--plot-fan", dest="plot_fan", help="Tracer la réponse du filtre en éventail (PNG)")
    _add_config_arguments(info_parser)
    return parser


def load_config(args: argparse.Namespace) -> ShearlabConfig:
    """Défauts ← environnement ← fichier --config ← options de la ligne de commande"""
    config = ShearlabConfig()
    if args.config:
        config = ShearlabConfig.from_file(args.config, base=config)
    names = ShearlabConfig.field_names()
    overrides = {key: value for key, value in vars(args).items() if key in names and value is not None}
    return config.with_overrides(overrides)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Point d'entrée principal du CLI ; renvoie le code de sortie"""
    parser = build_parser()
    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help()
        return EXIT_USAGE

    try:
        config = load_config(args)
    except ConfigError as e:
        Logger.error(f"Configuration: {e}")
        return EXIT_USAGE

    from . import setup_default_logging
    setup_default_logging(config.log_level)
    config.ensure_directories()
    cli = ShearlabCLI(config)

    try:
        if args.command == "ppft":
            return cli.ppft_command(args.action, args.input, args.output)
        if args.command == "weights":
            return cli.weights_command(args.out, args.condition, args.no_cache)
        if args.command in TRANSFORMS:
            return cli.transform_command(args.command, args.action, args.input, args.output,
                                         getattr(args, "weights", None))
        if args.command == "measure":
            return cli.measure_command(args.names, args.transform, args.out, args.csv, args.image,
                                       args.slope, args.speed_sizes, args.no_timing)
        if args.command == "info":
            return cli.info_command(args.transform, args.plot_fan)
    except KeyboardInterrupt:
        Logger.info("\n👋 Arrêt demandé par l'utilisateur")
        return EXIT_USAGE
    except NumericalError as e:
        Logger.error(f"Échec numérique ({args.command}): {e}")
        return EXIT_NUMERICAL
    except (ShearlabError, ValueError, FileNotFoundError) as e:
        Logger.error(f"Erreur {args.command}: {e}")
        return EXIT_USAGE
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
