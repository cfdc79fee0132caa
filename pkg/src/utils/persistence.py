"""Reading and writing instance and solution files (JSON)."""

from typing import Annotated, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field
from pydantic import ValidationError as SchemaError

from src.core.costs import QuadUVW, StationCost, TableCost
from src.core.errors import CostOverflowError, InstanceFormatError
from src.core.instance import Instance
from src.utils.logger import app_logger


class TableCostModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["table"]
    values: List[List[int]]


class QuadUVWModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["quad_uvw"]
    u: Tuple[int, int]
    v: Tuple[int, int]
    w: Tuple[int, int]


CostModel = Annotated[Union[TableCostModel, QuadUVWModel], Field(discriminator="kind")]


class InstanceFile(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n: int
    D: int
    B: int
    gamma: int
    ell: List[int]
    u: List[int]
    dbar: List[int]
    bbar: List[int]
    costs: List[CostModel]

    def to_instance(self) -> Instance:
        costs: List[StationCost] = []
        for c in self.costs:
            if isinstance(c, TableCostModel):
                costs.append(TableCost(tuple(tuple(row) for row in c.values)))
            else:
                costs.append(QuadUVW(c.u, c.v, c.w))
        return Instance(
            n=self.n,
            D=self.D,
            B=self.B,
            gamma=self.gamma,
            ell=self.ell,
            u=self.u,
            dbar=self.dbar,
            bbar=self.bbar,
            costs=tuple(costs),
        )

    @classmethod
    def from_instance(cls, inst: Instance) -> "InstanceFile":
        costs = []
        for c in inst.costs:
            if isinstance(c, TableCost):
                costs.append(TableCostModel(kind="table", values=[list(row) for row in c.values]))
            else:
                costs.append(QuadUVWModel(kind="quad_uvw", u=c.u, v=c.v, w=c.w))
        return cls(
            n=inst.n,
            D=inst.D,
            B=inst.B,
            gamma=inst.gamma,
            ell=list(inst.ell),
            u=list(inst.u),
            dbar=list(inst.dbar),
            bbar=list(inst.bbar),
            costs=costs,
        )


class TraceRecord(BaseModel):
    k: int
    d: List[int]
    b: List[int]
    objective: int
    distance: int


class SolutionFile(BaseModel):
    model_config = ConfigDict(extra="forbid")

    d: List[int]
    b: List[int]
    objective: int
    iterations: int
    distance: int
    algorithm: str
    trace: Optional[List[TraceRecord]] = None


def _problems(error: SchemaError) -> List[str]:
    return [
        f"{'.'.join(str(part) for part in e['loc']) or '<root>'}: {e['msg']}"
        for e in error.errors()
    ]


def dump_model(model: BaseModel) -> str:
    return model.model_dump_json(indent=2) + "\n"


def parse_instance(text: str, source: str = "<string>") -> Instance:
    """Parse instance JSON.

    Raises:
        InstanceFormatError: On malformed JSON or schema errors, one problem per location
    """
    try:
        model = InstanceFile.model_validate_json(text)
        return model.to_instance()
    except SchemaError as e:
        raise InstanceFormatError(source, _problems(e)) from e
    except (ValueError, CostOverflowError) as e:
        # cost construction (ragged table, out-of-range value)
        raise InstanceFormatError(source, [f"costs: {e}"]) from e


def load_instance(path: str) -> Instance:
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise InstanceFormatError(path, [str(e)]) from e
    inst = parse_instance(text, path)
    app_logger.debug(f"Loaded instance {path}: n={inst.n}, D+B={inst.total}")
    return inst


def save_instance(inst: Instance, path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(dump_model(InstanceFile.from_instance(inst)))
    app_logger.debug(f"Saved instance to {path}")


def load_solution(path: str) -> SolutionFile:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return SolutionFile.model_validate_json(f.read())
    except SchemaError as e:
        raise InstanceFormatError(path, _problems(e)) from e
    except OSError as e:
        raise InstanceFormatError(path, [str(e)]) from e


def save_solution(solution: SolutionFile, path: Optional[str]) -> str:
    """Write the solution to path (stdout when path is None); returns the JSON."""
    text = dump_model(solution)
    if path is None:
        print(text, end="")
    else:
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
        app_logger.info(f"Wrote solution to {path}")
    return text
