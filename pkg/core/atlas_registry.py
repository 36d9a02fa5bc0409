"""
Registro de atlas birracionales empaquetados (atlases/*.yaml).

Cada archivo declara el sistema base y sus cartas como expresiones en el
formato de los archivos .sys; el registro valida, cachea y construye las
cartas exactas.
"""

import logging
from pathlib import Path
from typing import Any

import yaml

from .algebra import MultiPoly
from .charts import Chart
from .config import SystemConfig
from .field import RationalMap
from .sysdef import SystemDoc, parse_expression

logger = logging.getLogger(__name__)


class AtlasRegistry:
    """
    Gestor de atlas declarados en YAML.

    - Carga perezosa con cache por identificador
    - Validación de campos requeridos antes de cachear
    - Construcción de Chart a partir del documento del sistema
    """

    def __init__(self, atlases_dir: Path | None = None) -> None:
        self.atlases_dir = Path(atlases_dir or SystemConfig.ATLASES_DIR)
        self._cache: dict[str, dict[str, Any]] = {}

    def load_atlas(self, atlas_id: str) -> dict[str, Any]:
        """
        Carga la declaración de un atlas desde YAML.

        Args:
            atlas_id: Nombre del archivo sin extensión

        Returns:
            Declaración validada

        Raises:
            FileNotFoundError: Si no existe el archivo
            ValueError: Si la declaración es inválida
        """
        if atlas_id in self._cache:
            return self._cache[atlas_id]

        config_path = self.atlases_dir / f"{atlas_id}.yaml"
        if not config_path.exists():
            logger.error("Atlas file not found: %s", config_path)
            raise FileNotFoundError(f"Atlas '{atlas_id}' not found")

        try:
            with open(config_path, encoding="utf-8") as file:
                config = yaml.safe_load(file)
        except yaml.YAMLError as e:
            logger.error("YAML error in %s: %s", config_path, str(e))
            raise ValueError(f"Atlas '{atlas_id}' is not valid YAML") from e

        if not isinstance(config, dict):
            raise ValueError(f"Invalid atlas declaration in {config_path}")

        self._validate_config(config, atlas_id)
        self._cache[atlas_id] = config
        logger.debug("📚 Atlas loaded: %s (%d charts)", atlas_id, len(config["charts"]))
        return config

    def get_available_atlases(self) -> list[str]:
        """Identificadores de los atlas válidos del directorio."""
        if not self.atlases_dir.exists():
            logger.warning("Atlas directory does not exist: %s", self.atlases_dir)
            return []

        atlases = []
        for yaml_file in self.atlases_dir.glob("*.yaml"):
            try:
                self.load_atlas(yaml_file.stem)
                atlases.append(yaml_file.stem)
            except (ValueError, FileNotFoundError) as e:
                logger.warning("Skipping invalid atlas %s: %s", yaml_file.stem, str(e))
        return sorted(atlases)

    def _validate_config(self, config: dict[str, Any], atlas_id: str) -> None:
        """
        Valida la estructura de una declaración.

        Raises:
            ValueError: Si falta un campo o tiene el tipo equivocado
        """
        for field_name in ("name", "system"):
            value = config.get(field_name)
            if not isinstance(value, str) or not value.strip():
                raise ValueError(f"Field '{field_name}' must be a non-empty string in {atlas_id}")

        charts = config.get("charts")
        if not isinstance(charts, list) or not charts:
            raise ValueError(f"Field 'charts' must be a non-empty list in {atlas_id}")

        seen: set[str] = set()
        for index, chart in enumerate(charts):
            where = f"{atlas_id} chart #{index + 1}"
            if not isinstance(chart, dict):
                raise ValueError(f"{where} must be a mapping")
            name = chart.get("name")
            if not isinstance(name, str) or not name.strip():
                raise ValueError(f"{where}: 'name' must be a non-empty string")
            if name in seen:
                raise ValueError(f"{where}: duplicate chart name '{name}'")
            seen.add(name)
            if not isinstance(chart.get("boundary"), (str, int)):
                raise ValueError(f"{where}: 'boundary' is required")
            if not isinstance(chart.get("volume_preserving"), bool):
                raise ValueError(f"{where}: 'volume_preserving' must be true or false")
            for side in ("forward", "inverse"):
                mapping = chart.get(side)
                if not isinstance(mapping, dict) or not mapping:
                    raise ValueError(f"{where}: '{side}' must be a non-empty mapping")
                if not all(isinstance(v, (str, int)) for v in mapping.values()):
                    raise ValueError(f"{where}: '{side}' values must be expressions")

        params = config.get("params", {})
        if not isinstance(params, dict):
            raise ValueError(f"Field 'params' must be a mapping in {atlas_id}")

    def build_charts(self, atlas_id: str, doc: SystemDoc) -> tuple[Chart, ...]:
        """
        Construye las cartas exactas sobre las variables del documento.

        Raises:
            ValueError: Si las variables de la declaración no coinciden
            NotInvertible: Si alguna inversa declarada no es inversa
        """
        config = self.load_atlas(atlas_id)
        if config["system"] != doc.name:
            logger.warning(
                "⚠️ Atlas %s declared for %s, applied to %s", atlas_id, config["system"], doc.name
            )
        ambient = set(doc.params) | {e.name for e in doc.expsyms}
        charts = []
        for entry in config["charts"]:
            forward = entry["forward"]
            inverse = entry["inverse"]
            new_vars = tuple(str(k) for k in forward)
            if set(inverse) != set(doc.variables):
                raise ValueError(
                    f"{atlas_id}/{entry['name']}: inverse must assign {doc.variables}"
                )
            forward_exprs = [
                parse_expression(str(forward[v]), ambient | set(doc.variables), True)
                for v in new_vars
            ]
            inverse_exprs = [
                parse_expression(str(inverse[v]), ambient | set(new_vars), True)
                for v in doc.variables
            ]
            boundary = parse_expression(str(entry["boundary"]), set(new_vars) | ambient)
            mapping = RationalMap.build(
                doc.variables, new_vars, forward_exprs, inverse_exprs,
                entry.get("note", ""), entry["name"], check=True,
            )
            charts.append(
                Chart(entry["name"], mapping, MultiPoly.coerce(boundary.as_poly()),
                      entry["volume_preserving"])
            )
        logger.info("🗺️ Built %d charts for atlas %s", len(charts), atlas_id)
        return tuple(charts)

    def default_params(self, atlas_id: str) -> dict[str, str]:
        """Valores exactos sugeridos por la declaración (texto a/b+c/d*i)."""
        return {str(k): str(v) for k, v in self.load_atlas(atlas_id).get("params", {}).items()}

    def clear_cache(self) -> None:
        self._cache.clear()
        logger.debug("Atlas cache cleared")

    def reload_atlas(self, atlas_id: str) -> dict[str, Any]:
        self._cache.pop(atlas_id, None)
        return self.load_atlas(atlas_id)
