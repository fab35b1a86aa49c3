"""
Batch orchestrator for running many independent simulations concurrently
"""

import asyncio
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, TypeVar

from .config import settings
from .log import get_logger

T = TypeVar("T")

logger = get_logger(__name__)


class BatchRunner:
    """Runs indexed jobs on a bounded worker pool, results ordered by index"""

    def __init__(self, max_workers: Optional[int] = None):
        self.max_workers = max(1, max_workers or settings.threads)
        self.completed = 0

    async def _run_one(
        self,
        executor: ThreadPoolExecutor,
        semaphore: asyncio.Semaphore,
        job: Callable[[int], T],
        index: int,
        total: int,
    ) -> T:
        async with semaphore:
            loop = asyncio.get_running_loop()
            result = await loop.run_in_executor(executor, job, index)
            self.completed += 1
            logger.debug("batch.progress", index=index, completed=self.completed, total=total)
            return result

    async def map(self, job: Callable[[int], T], count: int) -> List[T]:
        """Run job(0) ... job(count - 1); the returned list is in index order."""
        self.completed = 0
        semaphore = asyncio.Semaphore(self.max_workers)
        with ThreadPoolExecutor(max_workers=self.max_workers) as executor:
            tasks = [
                asyncio.create_task(self._run_one(executor, semaphore, job, i, count))
                for i in range(count)
            ]
            return list(await asyncio.gather(*tasks))

    def run(self, job: Callable[[int], T], count: int) -> List[T]:
        """Blocking wrapper around map for synchronous callers."""
        logger.info("batch.start", jobs=count, workers=self.max_workers)
        results = asyncio.run(self.map(job, count))
        logger.info("batch.finished", jobs=count)
        return results
