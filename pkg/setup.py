#!/usr/bin/env python
# -*- coding: utf-8 -*-

# Copyright 2020 Scriptim, 2026 spikeloom contributors
# Licensed under the MIT license, see LICENSE.md.

import setuptools

with open('README.md', 'r') as readme:
    long_description = readme.read()

setuptools.setup(
    name='spikeloom',
    version='0.1.0',
    description='Simulator of spiking assembly circuits with synaptic delays: pacemakers, selectors, decoders and '
                'activation-based memory',
    license='MIT',
    long_description=long_description,
    long_description_content_type='text/markdown',
    packages=['spikeloom'],
    install_requires=['numpy', 'colorama', 'matplotlib'],
    extras_require={'test': ['pytest', 'hypothesis']},
    entry_points={'console_scripts': ['spikeloom=spikeloom.cli:main']},
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Environment :: Console',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: MIT License',
        'Natural Language :: English',
        'Operating System :: OS Independent',
        'Programming Language :: Python',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3 :: Only',
        'Topic :: Scientific/Engineering :: Artificial Intelligence',
    ],
    python_requires='>=3.8',
)
