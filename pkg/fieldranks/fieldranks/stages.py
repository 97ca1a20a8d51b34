# Copyright (c) 2024 Contributors
# All rights reserved.

from collections.abc import Iterable
from dataclasses import dataclass
from functools import reduce
from typing import Any, Generic, TypeVar

from generics import TypeAnnotatedMeta

TStageInput = TypeVar('TStageInput')
TStageResult = TypeVar('TStageResult')

TPipelineInput = TypeVar('TPipelineInput')
TPipelineResult = TypeVar('TPipelineResult')


@dataclass
class Stage(Generic[TStageInput, TStageResult], metaclass=TypeAnnotatedMeta):
    """One step of a command: transform the input, then consume every result.

    `Stage[Job, Report]` records Job and Report as TStageInput and
    TStageResult, so a chain of stages is checked when the pipeline is built.
    """

    def transform(self, input: TStageInput) -> Iterable[TStageResult]:
        return []

    def consume(self, result: TStageResult) -> None:
        return

    def run(self, input: TStageInput) -> list[TStageResult]:
        results = list(self.transform(input)) or [input]
        for result in results:
            self.consume(result)
        return results

    def __call__(self, input: TStageInput) -> list[TStageResult]:
        return self.run(input)


class Pipeline(Generic[TPipelineInput, TPipelineResult], metaclass=TypeAnnotatedMeta):
    """Stages run in order, each on every result of the one before.

    The input type of every stage must equal the result type of the previous
    one, starting from TPipelineInput and ending at TPipelineResult.
    """

    def __init__(self, stages: Iterable[Stage[Any, Any]]):
        self.stages = self._validate_stages(list(stages))

    def _validate_stages(self, stages: list[Stage[Any, Any]]) -> list[Stage[Any, Any]]:
        if not stages:
            raise ValueError("a pipeline needs at least one stage")

        def validate_type(expected, stage):
            if expected != stage.TStageInput:
                raise TypeError(f"Input type of {stage} ({stage.TStageInput}) does not match {expected}.")
            return stage.TStageResult

        if self.TPipelineResult != reduce(validate_type, stages, self.TPipelineInput):
            raise TypeError(
                f"Output type of the last stage ({stages[-1].TStageResult}) does not match {self.TPipelineResult}."
            )
        return stages

    def run(self, input: TPipelineInput) -> list[TPipelineResult]:
        results = [input]
        for stage in self.stages:
            results = [out for r in results for out in stage(r)]
        return results

    def __call__(self, input: TPipelineInput) -> list[TPipelineResult]:
        return self.run(input)
