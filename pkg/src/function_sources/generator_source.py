from cube_core.generators import GENERATORS, generate, parse_generator_spec
from verification_core.converters import instance_id
from verification_core.interfaces import AbstractFunctionSource
from verification_core.models import Instance, Params

SETTINGS = ("n", "p")


class GeneratorSource(AbstractFunctionSource):
    """
    Builds a named function from a spec such as ``antitribes:s=2,w=3``.

    ``n`` and ``p`` inside the spec win over the constructor arguments; a sweep point may
    override them and any parameter of the generator.
    """

    def __init__(self, spec: str, n: int | None = None, p: float | None = None):
        self.spec = spec.strip()
        self.kind, params = parse_generator_spec(self.spec)
        self.in_spec = {k for k in SETTINGS if k in params}
        self.settings = {"n": params.get("n", n), "p": params.get("p", p)}
        self.params = {k: v for k, v in params.items() if k not in SETTINGS}

    def parameters(self) -> set[str]:
        return {*SETTINGS, *GENERATORS[self.kind].defaults}

    def load(self, overrides: Params | None = None) -> Instance:
        overrides = dict(overrides or {})
        settings = {**self.settings, **{k: v for k, v in overrides.items() if k in SETTINGS}}
        swept = {k: v for k, v in overrides.items() if k not in SETTINGS}
        params = {**GENERATORS[self.kind].defaults, **self.params, **swept}
        n, p = settings["n"], settings["p"]
        f = generate(self.kind, n=None if n is None else int(n), p=0.5 if p is None else float(p), **params)
        shown = {
            k: v for k, v in settings.items() if v is not None and (k in overrides or k not in self.in_spec)
        }
        return Instance(instance_id(self.spec, {**shown, **swept}), f, {"kind": self.kind, "params": params})
